#include "vemo/waveform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vemo/fft.hpp"
#include "vemo/rng.hpp"

namespace vemo {

const std::vector<int>& OfdmConfig::bins(const std::string& app) const {
    auto it = allocation.find(app);
    if (it == allocation.end())
        throw std::invalid_argument("ofdm: no allocation for app \"" + app + "\"");
    return it->second;
}

OfdmConfig ofdm_config(const PhyDefaults& phy) {
    OfdmConfig cfg;
    cfg.n_subcarriers = phy.n_subcarriers;
    cfg.cp_len = phy.cp_len;
    cfg.allocation["comm"] = phy.comm_subcarriers;
    cfg.allocation["radar"] = phy.radar_subcarriers;
    cfg.modulation = phy.modulation;
    // same split the scenario parser applies when the lists are omitted
    if (cfg.allocation["comm"].empty())
        for (int i = 0; i < std::min(40, phy.n_subcarriers); ++i)
            cfg.allocation["comm"].push_back(i);
    if (cfg.allocation["radar"].empty())
        for (int i = std::min(40, phy.n_subcarriers); i < phy.n_subcarriers; ++i)
            cfg.allocation["radar"].push_back(i);
    return cfg;
}

double NomaConfig::alpha() const {
    const double r = undb10(power_split_db);
    return r / (1.0 + r);
}

TransecKey transec_key_from_hex(const std::string& hex) {
    if (hex.empty() || hex.size() > 32)
        throw std::invalid_argument("transec key: expected 1..32 hex digits");
    TransecKey key;
    // right-align: the last 8 digits fill words[3]
    std::string padded(32 - hex.size(), '0');
    padded += hex;
    for (int w = 0; w < 4; ++w) {
        std::uint32_t v = 0;
        for (int i = 0; i < 8; ++i) {
            const char c = padded[w * 8 + i];
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else throw std::invalid_argument("transec key: bad hex digit");
            v = (v << 4) | static_cast<std::uint32_t>(d);
        }
        key.words[w] = v;
    }
    return key;
}

int bits_per_symbol(Modulation m) { return m == Modulation::qpsk ? 2 : 1; }

std::vector<std::complex<double>> map_bits(const std::vector<int>& bits, Modulation m) {
    std::vector<std::complex<double>> out;
    if (m == Modulation::qpsk) {
        if (bits.size() % 2) throw std::invalid_argument("qpsk: odd bit count");
        out.reserve(bits.size() / 2);
        const double s = 1.0 / std::sqrt(2.0);
        for (std::size_t i = 0; i < bits.size(); i += 2)
            out.emplace_back((1 - 2 * bits[i]) * s, (1 - 2 * bits[i + 1]) * s);
    } else {
        out.reserve(bits.size());
        for (int b : bits) out.emplace_back(1 - 2 * b, 0.0);
    }
    return out;
}

std::vector<int> demap_symbols(const std::vector<std::complex<double>>& symbols, Modulation m) {
    std::vector<int> bits;
    if (m == Modulation::qpsk) {
        bits.reserve(symbols.size() * 2);
        for (const auto& x : symbols) {
            bits.push_back(x.real() < 0.0 ? 1 : 0);
            bits.push_back(x.imag() < 0.0 ? 1 : 0);
        }
    } else {
        bits.reserve(symbols.size());
        for (const auto& x : symbols) bits.push_back(x.real() < 0.0 ? 1 : 0);
    }
    return bits;
}

std::vector<int> pn_bits(std::uint64_t seed, std::size_t count) {
    auto g = rng::engine(seed);
    std::vector<int> bits(count);
    for (auto& b : bits) b = static_cast<int>(g() & 1u);
    return bits;
}

std::vector<int> pilot_bits(const OfdmConfig& cfg, const std::string& app) {
    const auto& bins = cfg.bins(app);
    const std::size_t count =
        static_cast<std::size_t>(bits_per_symbol(cfg.modulation)) * bins.size();
    return pn_bits(rng::derive(0x70495f4f54ull, app, cfg.n_subcarriers,
                               static_cast<std::uint64_t>(bins.size())),
                   count);
}

namespace {

void check_bins(const OfdmConfig& cfg, const std::vector<int>& bins) {
    if (bins.empty()) throw std::invalid_argument("ofdm: empty allocation");
    for (int b : bins)
        if (b < 0 || b >= cfg.n_subcarriers)
            throw std::invalid_argument("ofdm: subcarrier index out of range");
}

// One OFDM symbol from frequency-domain values, CP prepended.
void append_symbol(ComplexSignal& out, std::vector<std::complex<double>>& freq,
                   const OfdmConfig& cfg) {
    fft_pow2(freq, true);
    const int n = cfg.n_subcarriers;
    for (int i = n - cfg.cp_len; i < n; ++i) out.push_back(freq[i]);
    for (int i = 0; i < n; ++i) out.push_back(freq[i]);
}

} // namespace

ComplexSignal ofdm_modulate(const std::vector<int>& bits, const OfdmConfig& cfg,
                            const std::string& app, bool normalized) {
    const auto& bins = cfg.bins(app);
    check_bins(cfg, bins);
    const int bps = bits_per_symbol(cfg.modulation);
    const std::size_t per_symbol = static_cast<std::size_t>(bps) * bins.size();
    if (per_symbol == 0 || bits.size() % per_symbol)
        throw std::invalid_argument("ofdm_modulate: bit count " + std::to_string(bits.size()) +
                                    " is not a whole number of symbols (" +
                                    std::to_string(per_symbol) + " bits each)");
    const std::size_t n_symbols = bits.size() / per_symbol;
    const auto points = map_bits(bits, cfg.modulation);

    ComplexSignal out;
    out.reserve(n_symbols * static_cast<std::size_t>(cfg.symbol_len()));
    std::vector<std::complex<double>> freq;
    for (std::size_t sym = 0; sym < n_symbols; ++sym) {
        freq.assign(cfg.n_subcarriers, {0.0, 0.0});
        for (std::size_t i = 0; i < bins.size(); ++i)
            freq[bins[i]] = points[sym * bins.size() + i];
        append_symbol(out, freq, cfg);
    }
    if (normalized) normalize_unit_power(out);
    return out;
}

std::vector<std::vector<std::complex<double>>> ofdm_extract_bins(const ComplexSignal& signal,
                                                                 const OfdmConfig& cfg,
                                                                 const std::string& app) {
    const auto& bins = cfg.bins(app);
    check_bins(cfg, bins);
    const std::size_t sym_len = static_cast<std::size_t>(cfg.symbol_len());
    if (signal.empty() || signal.size() % sym_len)
        throw std::invalid_argument("ofdm: signal length is not a whole number of symbols");
    const std::size_t n_symbols = signal.size() / sym_len;

    std::vector<std::vector<std::complex<double>>> out(n_symbols);
    std::vector<std::complex<double>> freq(cfg.n_subcarriers);
    for (std::size_t sym = 0; sym < n_symbols; ++sym) {
        const auto* base = signal.data() + sym * sym_len + cfg.cp_len;
        freq.assign(base, base + cfg.n_subcarriers);
        fft_pow2(freq, false);
        out[sym].reserve(bins.size());
        for (int b : bins) out[sym].push_back(freq[b]);
    }
    return out;
}

std::vector<int> ofdm_demodulate(const ComplexSignal& signal, const OfdmConfig& cfg,
                                 const std::string& app) {
    std::vector<int> bits;
    for (const auto& sym : ofdm_extract_bins(signal, cfg, app)) {
        const auto b = demap_symbols(sym, cfg.modulation);
        bits.insert(bits.end(), b.begin(), b.end());
    }
    return bits;
}

ComplexSignal ofdm_burst(const std::vector<int>& bits, const OfdmConfig& cfg,
                         const std::string& app, bool normalized) {
    auto all = pilot_bits(cfg, app);
    all.insert(all.end(), bits.begin(), bits.end());
    return ofdm_modulate(all, cfg, app, normalized);
}

ComplexSignal radar_pulse(const OfdmConfig& cfg, std::uint64_t seed, int n_symbols,
                          bool normalized) {
    const auto& bins = cfg.bins("radar");
    check_bins(cfg, bins);
    if (n_symbols < 1) throw std::invalid_argument("radar_pulse: n_symbols < 1");
    const std::size_t count =
        static_cast<std::size_t>(n_symbols) * bins.size() * 2; // QPSK reference
    OfdmConfig ref = cfg;
    ref.modulation = Modulation::qpsk;
    return ofdm_modulate(pn_bits(seed, count), ref, "radar", normalized);
}

ComplexSignal noma_combine(const ComplexSignal& outer, const ComplexSignal& inner,
                           const NomaConfig& cfg) {
    if (outer.size() != inner.size())
        throw std::invalid_argument("noma_combine: layer lengths differ");
    const double a = cfg.alpha();
    const double wo = std::sqrt(a), wi = std::sqrt(1.0 - a);
    ComplexSignal out(outer.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = wo * outer[i] + wi * inner[i];
    return out;
}

ComplexSignal transec_jam(const TransecKey& key, std::size_t n) {
    if (n < 1) throw std::invalid_argument("transec_jam: n < 1");
    std::seed_seq seq(key.words.begin(), key.words.end());
    std::mt19937_64 g(seq);
    ComplexSignal out;
    out.reserve(n);
    constexpr double quarter = std::numbers::pi / 4.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = quarter + (g() & 3u) * (std::numbers::pi / 2.0);
        out.emplace_back(std::cos(phase), std::sin(phase));
    }
    return out;
}

} // namespace vemo
