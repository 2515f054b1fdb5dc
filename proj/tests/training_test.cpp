#include "terraclass/errors.hpp"
#include "terraclass/training.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace terraclass;
using terraclass::test::TempDir;
using terraclass::test::write_file;

namespace {

ErrorCode roi_error(const std::string& text, std::size_t rows, std::size_t cols) {
    TempDir dir;
    write_file(dir / "roi.csv", text);
    try {
        (void)load_roi(dir / "roi.csv", rows, cols);
    } catch (const ValidationError& e) {
        return e.code();
    }
    FAIL("expected ValidationError");
    return ErrorCode::Validation;
}

} // namespace

TEST_CASE("load_roi") {
    TempDir dir;
    write_file(dir / "roi.csv", "class,row,col\n1,0,0\n");
    const auto roi = load_roi(dir / "roi.csv", 2, 2);
    CHECK(roi.size() == 1);
    CHECK(roi.entries()[0] == RoiPixel{1, 0, 0});

    CHECK(roi_error("class,row,col\n1,5,0\n", 2, 2) == ErrorCode::OutOfBounds);
    CHECK(roi_error("class,row,col\n", 2, 2) == ErrorCode::EmptyRoi);
    CHECK(roi_error("class,row,col\n1,0,0\n2,0,0\n", 2, 2) == ErrorCode::DuplicatePixel);
    CHECK(roi_error("class,row,col\n0,0,0\n", 2, 2) == ErrorCode::Validation);
}

TEST_CASE("write_roi round-trips") {
    TempDir dir;
    const RoiSet roi({{2, 1, 0}, {1, 0, 1}}, 2, 2);
    write_roi(roi, dir / "r.csv");
    const auto back = load_roi(dir / "r.csv", 2, 2);
    CHECK(back.entries() == roi.entries());
    CHECK(back.class_ids() == std::vector<ClassId>{1, 2});
}

TEST_CASE("class statistics by hand") {
    // Two bands; pixel (0,0) = (1,1), pixel (0,1) = (3,3).
    const MultibandRaster r(2, 1, 2, {1, 3, 1, 3});
    const RoiSet roi({{1, 0, 0}, {1, 0, 1}}, 1, 2);
    const auto stats = compute_class_stats(r, roi);
    REQUIRE(stats.classes.size() == 1);
    const auto& c = stats.classes[0];
    CHECK(c.mean[0] == 2.0);
    CHECK(c.mean[1] == 2.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(c.covariance(i, j) == 2.0);
    CHECK_FALSE(c.covariance_usable());
}

TEST_CASE("single pixel and constant classes") {
    const MultibandRaster r(2, 1, 4, {5, 4, 4, 4, 6, 4, 4, 4});
    const RoiSet roi({{1, 0, 0}, {2, 0, 1}, {2, 0, 2}, {2, 0, 3}}, 1, 4);
    const auto stats = compute_class_stats(r, roi);
    const auto* one = stats.find(1);
    REQUIRE(one != nullptr);
    CHECK(one->count == 1);
    CHECK(one->mean[0] == 5.0);
    CHECK(one->mean[1] == 6.0);
    CHECK_FALSE(one->covariance_usable());
    const auto* two = stats.find(2);
    REQUIRE(two != nullptr);
    CHECK(two->covariance.isZero(0.0));
    CHECK(two->covariance_usable());
}

TEST_CASE("pooled covariance") {
    // One band: class 1 = {-1, 0, 1}, class 2 = {10, 10 + sqrt 2, 10 - sqrt 2}.
    const MultibandRaster exact(1, 1, 6, {-1, 0, 1, 10, 10 + std::sqrt(2.0), 10 - std::sqrt(2.0)});
    const RoiSet roi({{1, 0, 0}, {1, 0, 1}, {1, 0, 2}, {2, 0, 3}, {2, 0, 4}, {2, 0, 5}}, 1, 6);
    const auto stats = compute_class_stats(exact, roi);
    // Class 1 variance 1, class 2 variance 2: pooled (2*1 + 2*2)/4 = 1.5.
    CHECK(stats.find(1)->covariance(0, 0) == doctest::Approx(1.0));
    CHECK(stats.find(2)->covariance(0, 0) == doctest::Approx(2.0));
    CHECK(pooled_covariance(stats)(0, 0) == doctest::Approx(1.5));

    ClassStats manual;
    manual.bands = 1;
    ClassStat a;
    a.class_id = 1;
    a.count = 3;
    a.mean = Eigen::VectorXd::Zero(1);
    a.covariance = Eigen::MatrixXd::Constant(1, 1, 2.0);
    ClassStat b = a;
    b.class_id = 2;
    b.covariance(0, 0) = 4.0;
    manual.classes = {a, b};
    CHECK(pooled_covariance(manual)(0, 0) == 3.0);

    manual.classes = {a, a};
    manual.classes[1].class_id = 2;
    CHECK(pooled_covariance(manual)(0, 0) == 2.0);

    manual.classes[1].count = 1;
    CHECK_THROWS_AS((void)pooled_covariance(manual), ValidationError);
}

TEST_CASE("statistics are invariant to ROI order and symmetric") {
    std::mt19937_64 rng(3);
    const auto r = test::random_raster(rng, 3, 6, 6);
    std::vector<RoiPixel> px;
    for (std::size_t i = 0; i < 36; ++i) {
        px.push_back({static_cast<ClassId>(1 + i % 3), i / 6, i % 6});
    }
    const auto s1 = compute_class_stats(r, RoiSet(px, 6, 6));
    std::shuffle(px.begin(), px.end(), rng);
    const auto s2 = compute_class_stats(r, RoiSet(px, 6, 6));
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(s1.classes[c].mean == s2.classes[c].mean);
        CHECK(s1.classes[c].covariance == s2.classes[c].covariance);
    }
    const auto pooled = pooled_covariance(s1);
    CHECK(pooled == pooled.transpose());
}
