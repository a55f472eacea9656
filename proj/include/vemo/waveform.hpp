#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vemo/scenario.hpp"
#include "vemo/signal.hpp"

namespace vemo {

// Per-application OFDM partitioning. Allocation sets are disjoint ascending
// subcarrier index lists.
struct OfdmConfig {
    int n_subcarriers = 64;
    int cp_len = 16;
    std::map<std::string, std::vector<int>> allocation; // app tag -> bins
    Modulation modulation = Modulation::qpsk;

    int symbol_len() const { return n_subcarriers + cp_len; }
    const std::vector<int>& bins(const std::string& app) const;
};

OfdmConfig ofdm_config(const PhyDefaults& phy);

// Power-domain layering. r = power_split_db is the outer-over-inner ratio.
struct NomaConfig {
    double power_split_db = 10.0;
    double alpha() const; // outer power fraction, in [0.5, 1)
};

// 128-bit TRANSEC seed.
struct TransecKey {
    std::array<std::uint32_t, 4> words{};
    bool operator==(const TransecKey&) const = default;
};

TransecKey transec_key_from_hex(const std::string& hex); // <= 32 hex digits

int bits_per_symbol(Modulation m);

// Gray-mapped unit-power constellation points.
std::vector<std::complex<double>> map_bits(const std::vector<int>& bits, Modulation m);
std::vector<int> demap_symbols(const std::vector<std::complex<double>>& symbols, Modulation m);

// Deterministic pseudo-random bits (used for pilots, radar references, payload
// generation in the simulator).
std::vector<int> pn_bits(std::uint64_t seed, std::size_t count);

// Known pilot pattern for one OFDM symbol of the given app's bins.
std::vector<int> pilot_bits(const OfdmConfig& cfg, const std::string& app);

// bits -> OFDM symbols on the app's bins, zeros elsewhere, cyclic prefix
// prepended. |bits| must be a whole number of symbols.
ComplexSignal ofdm_modulate(const std::vector<int>& bits, const OfdmConfig& cfg,
                            const std::string& app, bool normalized = true);

// Hard-decision demodulation assuming an identity channel. For channels, see
// the pilot-equalized path in receiver.hpp.
std::vector<int> ofdm_demodulate(const ComplexSignal& signal, const OfdmConfig& cfg,
                                 const std::string& app);

// Per-symbol frequency-domain values on the app's bins (CP stripped, DFT).
std::vector<std::vector<std::complex<double>>> ofdm_extract_bins(const ComplexSignal& signal,
                                                                 const OfdmConfig& cfg,
                                                                 const std::string& app);

// Pilot symbol followed by the payload symbols; the receiver equalizes each
// bin against the known pilot.
ComplexSignal ofdm_burst(const std::vector<int>& bits, const OfdmConfig& cfg,
                         const std::string& app, bool normalized = true);

// Seeded pseudo-random QPSK on the radar bins; the matched-filter reference.
ComplexSignal radar_pulse(const OfdmConfig& cfg, std::uint64_t seed, int n_symbols,
                          bool normalized = true);

ComplexSignal noma_combine(const ComplexSignal& outer, const ComplexSignal& inner,
                           const NomaConfig& cfg);

// Constant-envelope keyed pseudo-noise QPSK chips, exactly unit power.
ComplexSignal transec_jam(const TransecKey& key, std::size_t n);

} // namespace vemo
