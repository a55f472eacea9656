#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "vemo/rng.hpp"
#include "vemo/signal_io.hpp"

using namespace vemo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() /
              ("vemo-io-" + std::to_string(rng::splitmix64(
                                static_cast<std::uint64_t>(::getpid()) ^ 0x10aull)));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

ComplexSignal random_signal(std::uint64_t seed, std::size_t n) {
    auto eng = rng::engine(seed);
    ComplexSignal sig(n);
    for (auto& z : sig) z = rng::cgaussian(eng, 1.0);
    return sig;
}

} // namespace

TEST_CASE("signal dumps round trip bit-exactly") {
    TempDir tmp;
    const auto path = tmp.file("burst.iq");
    const auto sig = random_signal(401, 1000);
    write_signal(path, sig, {{"sample_rate_epochs", "4096"}, {"app", "comm"}});

    const auto back = read_signal(path);
    REQUIRE(back.size() == sig.size());
    CHECK(back == sig); // raw f64 pairs: equality is exact, not approximate

    std::ifstream meta(path + ".json");
    REQUIRE(bool(meta));
    const auto side = nlohmann::json::parse(meta);
    CHECK(side.at("samples").get<std::size_t>() == 1000);
    CHECK(side.at("format") == "f64le-iq");
    CHECK(side.at("config").at("sample_rate_epochs") == "4096");
    CHECK(side.at("config").at("app") == "comm");
}

TEST_CASE("an empty signal still writes a valid pair of files") {
    TempDir tmp;
    const auto path = tmp.file("empty.iq");
    write_signal(path, {});
    CHECK(read_signal(path).empty());
}

TEST_CASE("a sidecar sample-count mismatch is refused") {
    TempDir tmp;
    const auto path = tmp.file("cut.iq");
    write_signal(path, random_signal(402, 64));
    fs::resize_file(path, 63 * 16); // drop one whole sample; sidecar still says 64
    CHECK_THROWS_AS(read_signal(path), std::runtime_error);
}

TEST_CASE("a dump that is not whole iq pairs is refused") {
    TempDir tmp;
    const auto path = tmp.file("ragged.iq");
    write_signal(path, random_signal(403, 8));
    fs::resize_file(path, 8 * 16 - 8); // half a complex sample
    CHECK_THROWS_AS(read_signal(path), std::runtime_error);
}

TEST_CASE("a missing dump is refused") {
    TempDir tmp;
    CHECK_THROWS_AS(read_signal(tmp.file("absent.iq")), std::runtime_error);
}
