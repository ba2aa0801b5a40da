#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pba/phantoms.hpp"
#include "pba/projector.hpp"
#include "support.hpp"

using namespace pba;

namespace {

double relative_gap(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

double column_sum(const Sinogram& s, std::size_t m) {
    double t = 0.0;
    for (double v : s.column(m)) t += v;
    return t;
}

}  // namespace

TEST_SUITE("projector") {

TEST_CASE("geometry construction and validation") {
    const Geometry g = Geometry::uniform(64, 0.0, 178.0, 2.0);
    CHECK(g.num_angles() == 90);
    CHECK(g.angles_deg.front() == 0.0);
    CHECK(g.angles_deg.back() == doctest::Approx(178.0));
    CHECK_NOTHROW(g.validate());
    CHECK(Geometry::uniform(64, -75.0, 75.0, 5.0).num_angles() == 31);

    Geometry bad = g;
    bad.angles_deg = {0.0, 10.0, 5.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.angles_deg = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.angles_deg = {0.0, 180.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(Geometry::uniform(64, 0.0, 178.0, 3.0), std::invalid_argument);
}

TEST_CASE("zero image and zero sinogram") {
    const Geometry g = Geometry::uniform(32, 0.0, 170.0, 10.0);
    CHECK(testing::max_abs(forward(Image(32), g).data()) == 0.0);
    CHECK(testing::max_abs(adjoint(Sinogram(g)).pixels()) == 0.0);
}

TEST_CASE("axis-aligned projection equals column sums") {
    const std::size_t n = 48;
    const Image img = testing::random_image(n, 3);
    const Sinogram s = forward(img, Geometry::uniform(n, 0.0, 0.0, 1.0));
    for (std::size_t col = 0; col < n; ++col) {
        double t = 0.0;
        for (std::size_t row = 0; row < n; ++row) t += img(row, col);
        CHECK(std::abs(s(col, 0) - t) <= 1e-10 * std::max(1.0, std::abs(t)));
    }
}

TEST_CASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(forward(Image(32), Geometry::uniform(33, 0.0, 90.0, 10.0)), std::invalid_argument);
    CHECK_THROWS_AS(forward3d(Volume(20, 32, 30), Geometry::uniform(32, 0.0, 90.0, 10.0)), std::invalid_argument);
}

TEST_CASE("every column of a supported phantom carries the image mass") {
    for (std::size_t n : {64u, 128u}) {
        const Image img = shepp_logan(n);
        const Sinogram s = forward(img, Geometry::uniform(n, 0.0, 179.0, 1.0));
        const double mass = img.sum();
        double worst = 0.0;
        for (std::size_t m = 0; m < s.num_angles(); ++m) worst = std::max(worst, relative_gap(column_sum(s, m), mass));
        CHECK(worst < 0.005);
    }
    const Image shapes = shapes_phantom(96, 3, 2);
    const Sinogram s = forward(shapes, Geometry::uniform(96, -90.0, 87.0, 3.0));
    for (std::size_t m = 0; m < s.num_angles(); ++m) CHECK(relative_gap(column_sum(s, m), shapes.sum()) < 0.005);
}

TEST_CASE("linearity") {
    const std::size_t n = 40;
    const Geometry g = Geometry::uniform(n, 0.0, 174.0, 6.0);
    const Image f = testing::random_image(n, 1), h = testing::random_image(n, 2);
    Image combo(n);
    for (std::size_t i = 0; i < combo.count(); ++i) combo.pixels()[i] = 2.5 * f.pixels()[i] - 0.75 * h.pixels()[i];
    const Sinogram sf = forward(f, g), sh = forward(h, g), sc = forward(combo, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < sc.data().size(); ++i)
        worst = std::max(worst, std::abs(sc.data()[i] - (2.5 * sf.data()[i] - 0.75 * sh.data()[i])));
    CHECK(worst <= 1e-10 * testing::max_abs(sc.data()));
}

TEST_CASE("adjoint identity over random pairs") {
    const std::size_t n = 64;
    const Geometry g = Geometry::uniform(n, 0.0, 178.0, 2.0);
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const Image f = testing::random_image(n, 1000 + trial);
        const Sinogram r = testing::random_sinogram(g, 5000 + trial);
        const double lhs = dot(forward(f, g).data(), r.data());
        const double rhs = dot(f.pixels(), adjoint(r).pixels());
        worst = std::max(worst, relative_gap(lhs, rhs));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("adjoint identity at oblique and odd-sized geometries") {
    const Geometry g = Geometry::uniform(33, -90.0, 81.0, 9.0);
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        const Image f = testing::random_image(33, trial);
        const Sinogram r = testing::random_sinogram(g, 77 + trial);
        CHECK(relative_gap(dot(forward(f, g).data(), r.data()), dot(f.pixels(), adjoint(r).pixels())) < 1e-10);
    }
}

TEST_CASE("single detector entry at zero degrees backprojects to one constant column") {
    const std::size_t n = 32, d = 11;
    Sinogram s(Geometry::uniform(n, 0.0, 0.0, 1.0));
    s(d, 0) = 1.0;
    const Image img = adjoint(s);
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t col = 0; col < n; ++col) CHECK(img(row, col) == doctest::Approx(col == d ? img(0, d) : 0.0));
    CHECK(img(0, d) > 0.0);
}

TEST_CASE("forward3d decouples into 2D slices") {
    const Volume v = blob_volume(20, 32, 32, 3);
    const Geometry g = Geometry::uniform(32, -60.0, 60.0, 10.0);
    const ProjectionStack st = forward3d(v, g);
    CHECK(st.nx() == 20);
    CHECK(st.num_angles() == g.num_angles());
    for (std::size_t x : {0u, 7u, 10u, 19u}) {
        const Sinogram expect = forward(v.slice(x), g);
        CHECK(testing::max_abs_diff(st.sinogram(x).data(), expect.data()) <= 1e-12 * std::max(1.0, testing::max_abs(expect.data())));
    }
    CHECK(testing::max_abs(forward3d(Volume(16, 32, 32), g).data()) == 0.0);
}

TEST_CASE("forward3d per-angle mass is constant") {
    const Volume v = blob_volume(32, 48, 48, 9);
    const ProjectionStack st = forward3d(v, Geometry::uniform(48, -75.0, 75.0, 5.0));
    for (std::size_t m = 0; m < st.num_angles(); ++m) {
        double t = 0.0;
        for (std::size_t x = 0; x < st.nx(); ++x)
            for (std::size_t d = 0; d < st.n_det(); ++d) t += st.at(x, d, m);
        CHECK(relative_gap(t, v.sum()) < 0.005);
    }
}

}  // TEST_SUITE
