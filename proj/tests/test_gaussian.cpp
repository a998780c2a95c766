#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hedgelab/gaussian.hpp"
#include "oracles.hpp"

using namespace hedgelab;

TEST_CASE("normal cdf matches erf-based reference") {
    for (double x = -8.0; x <= 8.0; x += 0.173) {
        CAPTURE(x);
        CHECK(norm_cdf(x) == Catch::Approx(oracle::phi(x)).epsilon(0.0).margin(1e-15));
    }
    CHECK(norm_cdf(0.0) == 0.5);
    CHECK(norm_cdf(40.0) == 1.0);
    CHECK(norm_cdf(-40.0) == 0.0);
}

TEST_CASE("normal pdf values") {
    CHECK(norm_pdf(0.0) == Catch::Approx(0.3989422804014327).epsilon(1e-15));
    for (double x = -10.0; x <= 10.0; x += 0.379)
        CHECK(norm_pdf(x) == Catch::Approx(oracle::npdf(x)).epsilon(1e-14));
}

TEST_CASE("inverse cdf round-trips through the cdf") {
    // Central and tail regions of the rational approximation.
    for (double p : {1e-300, 1e-60, 1e-12, 1e-6, 1e-3, 0.02, 0.21, 0.424,
                     0.5, 0.576, 0.79, 0.98, 1.0 - 1e-6, 1.0 - 1e-12}) {
        CAPTURE(p);
        const double x = norm_cdf_inv(p);
        if (p >= 1e-12 && p <= 1.0 - 1e-12)
            CHECK(norm_cdf(x) == Catch::Approx(p).epsilon(1e-13));
        // Mirrored argument agrees up to the rounding of 1-p itself, whose
        // half-ulp maps to an x error of about 1e-16/phi(x).
        if (p >= 1e-6 && p <= 0.5)
            CHECK(norm_cdf_inv(1.0 - p) ==
                  Catch::Approx(-x).margin(2e-16 / norm_pdf(x) + 1e-14));
    }
}

TEST_CASE("inverse cdf reference values") {
    CHECK(norm_cdf_inv(0.5) == 0.0);
    CHECK(norm_cdf_inv(0.975) == Catch::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(norm_cdf_inv(0.995) == Catch::Approx(2.5758293035489004).epsilon(1e-14));
    CHECK(norm_cdf_inv(0.84134474606854293) == Catch::Approx(1.0).epsilon(1e-13));
    CHECK(std::isinf(norm_cdf_inv(0.0)));
    CHECK(std::isinf(norm_cdf_inv(1.0)));
    CHECK(norm_cdf_inv(0.0) < 0.0);
    CHECK(norm_cdf_inv(1.0) > 0.0);
}
