#include "vemo/signal_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vemo {

namespace {

static_assert(sizeof(double) == 8, "signal dumps assume 64-bit doubles");

std::uint64_t to_le_bits(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t swapped = 0;
        for (int i = 0; i < 8; ++i) swapped |= ((bits >> (8 * i)) & 0xffu) << (8 * (7 - i));
        bits = swapped;
    }
    return bits;
}

double from_le_bits(std::uint64_t bits) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t swapped = 0;
        for (int i = 0; i < 8; ++i) swapped |= ((bits >> (8 * i)) & 0xffu) << (8 * (7 - i));
        bits = swapped;
    }
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

} // namespace

void write_signal(const std::string& path, const ComplexSignal& sig,
                  const std::map<std::string, std::string>& config) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_signal: cannot open " + path);
    for (const auto& z : sig) {
        const std::uint64_t re = to_le_bits(z.real()), im = to_le_bits(z.imag());
        out.write(reinterpret_cast<const char*>(&re), 8);
        out.write(reinterpret_cast<const char*>(&im), 8);
    }
    if (!out) throw std::runtime_error("write_signal: short write to " + path);

    nlohmann::json side;
    side["samples"] = sig.size();
    side["format"] = "f64le-iq";
    for (const auto& [k, v] : config) side["config"][k] = v;
    std::ofstream meta(path + ".json", std::ios::trunc);
    if (!meta) throw std::runtime_error("write_signal: cannot open " + path + ".json");
    meta << side.dump(2) << "\n";
}

ComplexSignal read_signal(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("read_signal: cannot open " + path);
    const auto bytes = static_cast<std::uint64_t>(in.tellg());
    if (bytes % 16 != 0)
        throw std::runtime_error("read_signal: " + path + " is not whole I/Q pairs");
    in.seekg(0);

    std::ifstream meta(path + ".json");
    if (meta) {
        const auto side = nlohmann::json::parse(meta, nullptr, false);
        if (!side.is_discarded() && side.contains("samples") &&
            side["samples"].get<std::uint64_t>() != bytes / 16)
            throw std::runtime_error("read_signal: sidecar sample count disagrees with " + path);
    }

    ComplexSignal sig;
    sig.reserve(bytes / 16);
    for (std::uint64_t i = 0; i < bytes / 16; ++i) {
        std::uint64_t re, im;
        in.read(reinterpret_cast<char*>(&re), 8);
        in.read(reinterpret_cast<char*>(&im), 8);
        sig.emplace_back(from_le_bits(re), from_le_bits(im));
    }
    if (!in) throw std::runtime_error("read_signal: short read from " + path);
    return sig;
}

} // namespace vemo
