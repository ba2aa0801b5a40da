#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pba/metrics.hpp"
#include "pba/phantoms.hpp"
#include "pba/recon.hpp"

using namespace pba;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pbatomo_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int pbatomo(const std::string& args) {
    const std::string cmd = std::string(PBATOMO_EXE) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "exp.ini";
    std::ofstream(p) << text;
    return p;
}

const std::string quick = std::string(PBA_CONFIG_DIR) + "/quick.ini";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes of validate and bad invocations") {
    const fs::path dir = scratch("validate");
    CHECK(pbatomo("validate " + quick) == 0);
    CHECK(pbatomo("validate " + (dir / "missing.ini").string()) == 1);
    CHECK(pbatomo("validate " + write_config(dir, "[phantom]\nn = 64\nbogus = 1\n").string()) == 1);
    CHECK(pbatomo("") == 1);
    CHECK(pbatomo("frobnicate " + quick) == 1);
    CHECK(pbatomo("sweep " + quick + " --axis lambda --values 1") == 1);
    CHECK(pbatomo("sweep " + quick + " --axis snr --values 5,abc") == 1);
    CHECK(pbatomo("--help") == 0);
}

TEST_CASE("run writes the report columns and is byte-reproducible without timing") {
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    REQUIRE(pbatomo("run " + quick + " -o " + a.string()) == 0);
    REQUIRE(pbatomo("run " + quick + " -o " + b.string()) == 0);
    for (const char* file : {"report.csv", "shifts_true.csv", "shifts_PBA.csv"}) {
        CAPTURE(file);
        REQUIRE(fs::exists(a / file));
        CHECK(slurp(a / file) == slurp(b / file));
    }
    CHECK(fs::exists(a / "PBA.pgm"));

    const auto rows = csv(a / "report.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"method", "phantom", "condition", "snr", "error", "final_residual",
                                              "updates_to_converge", "wall_ms"});
    std::vector<std::string> methods;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 8);
        methods.push_back(rows[i][0]);
        CHECK(rows[i][1] == "shepp_logan");
        CHECK(rows[i][2] == "random[-5:5]");
        CHECK(rows[i][3] == "15");
        CHECK(rows[i][7] == "0");
        CHECK(std::stod(rows[i][4]) > 0.0);
    }
    CHECK(methods == std::vector<std::string>{"PBA", "PM_LPF", "PM", "NONE", "ALIGNED"});
}

TEST_CASE("an invalid sweep value fails its rows without stopping the sweep") {
    const fs::path dir = scratch("sweep");
    const fs::path cfg = write_config(dir, R"([phantom]
n = 32
[geometry]
step = 10
[misalignment]
type = random
lo = -3
hi = 3
[align]
methods = PBA, NONE
updates = 2
inner_iters = 3
[output]
images = false
timing = false
)");
    CHECK(pbatomo("sweep " + cfg.string() + " --axis snr --values 10,-1,20 -o " + (dir / "out").string()) == 2);
    const auto rows = csv(dir / "out" / "sweep_snr.csv");
    REQUIRE(rows.size() == 7);
    CHECK(rows[0].front() == "snr");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CAPTURE(i);
        const bool bad = rows[i][0] == "-1";
        CHECK(bad == (i == 3 || i == 4));
        if (!bad) CHECK(std::stod(rows[i][5]) > 0.0);
    }
    CHECK(pbatomo("sweep " + cfg.string() + " --axis snr --values 10,20 -o " + (dir / "ok").string()) == 0);
}

TEST_CASE("an unaligned, noiseless NONE run reproduces a direct SIRT reconstruction") {
    const fs::path dir = scratch("golden");
    const fs::path cfg = write_config(dir, R"([phantom]
n = 48
[geometry]
step = 6
[misalignment]
type = none
[align]
methods = NONE
updates = 3
inner_iters = 5
[output]
images = false
timing = false
)");
    REQUIRE(pbatomo("run " + cfg.string() + " -o " + dir.string()) == 0);
    const auto rows = csv(dir / "report.csv");
    REQUIRE(rows.size() == 2);

    const Image truth = shepp_logan(48);
    const Sinogram s = forward(truth, Geometry::uniform(48, 0.0, 174.0, 6.0));
    Image f(48);
    Reconstructor(s.geometry(), ReconConfig{}).iterate(f, s, 15);
    CHECK(std::stod(rows[1][4]) == doctest::Approx(registered_error(f, truth).error).epsilon(1e-8));
    CHECK(std::stod(rows[1][5]) == doctest::Approx(residual(f, s)).epsilon(1e-8));
    CHECK(rows[1][2] == "none");
    CHECK(rows[1][3] == "");
}

}  // TEST_SUITE
