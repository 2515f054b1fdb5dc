#include "terraclass/accuracy.hpp"
#include "terraclass/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace terraclass;

TEST_CASE("published-style 2x2 matrix") {
    const auto cm = test::to_confusion({{35, 5}, {10, 50}});
    CHECK(overall_accuracy(cm) == doctest::Approx(0.85).epsilon(1e-15));
    // P_o = 0.85, P_e = 0.51, kappa = 0.34 / 0.49.
    CHECK(std::abs(kappa(cm) - 0.6938775510204082) < 1e-12);
    const auto pc = per_class_accuracy(cm);
    CHECK(*pc[0].producer == doctest::Approx(35.0 / 45));
    CHECK(*pc[1].producer == doctest::Approx(50.0 / 55));
    CHECK(*pc[0].user == doctest::Approx(35.0 / 40));
    CHECK(*pc[1].user == doctest::Approx(50.0 / 60));
}

TEST_CASE("diagonal and zero-diagonal matrices") {
    const auto diag = test::to_confusion({{4, 0, 0}, {0, 7, 0}, {0, 0, 1}});
    CHECK(overall_accuracy(diag) == 1.0);
    CHECK(kappa(diag) == 1.0);
    for (const auto& a : per_class_accuracy(diag)) {
        CHECK(*a.producer == 1.0);
        CHECK(*a.user == 1.0);
    }
    CHECK(overall_accuracy(test::to_confusion({{0, 3}, {2, 0}})) == 0.0);
}

TEST_CASE("independence gives zero kappa") {
    // Rows proportional to the column marginals (1:3): P_o = P_e.
    const auto cm = test::to_confusion({{2, 6}, {3, 9}});
    CHECK(std::abs(kappa(cm)) < 1e-15);
    CHECK(std::abs(test::kappa_oracle({{2, 6}, {3, 9}})) < 1e-12);
}

TEST_CASE("degenerate matrices") {
    try {
        (void)kappa(test::to_confusion({{5, 0}, {0, 0}}));
        FAIL("expected DegenerateChance");
    } catch (const ValidationError& e) {
        CHECK(e.code() == ErrorCode::DegenerateChance);
    }
    try {
        (void)overall_accuracy(test::to_confusion({{0}}));
        FAIL("expected EmptyMatrix");
    } catch (const ValidationError& e) {
        CHECK(e.code() == ErrorCode::EmptyMatrix);
    }
    const auto report = format_accuracy_report(test::to_confusion({{5, 0}, {0, 0}}));
    CHECK(report.find("kappa,NA") != std::string::npos);
}

TEST_CASE("build_confusion") {
    const ClassRaster pred(2, 2, std::vector<ClassId>{1, 2, 2, 0});
    const RoiSet same({{1, 0, 0}, {2, 0, 1}, {2, 1, 0}}, 2, 2);
    const auto cm = build_confusion(pred, same);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.at(1, 1) == 2);
    CHECK(cm.at(0, 1) == 0);
    CHECK(cm.at(1, 0) == 0);

    const RoiSet wrong({{3, 0, 0}}, 2, 2);
    const auto off = build_confusion(pred, wrong);
    REQUIRE(off.class_ids() == std::vector<ClassId>{1, 3});
    CHECK(off.at(0, 1) == 1);
    CHECK(off.diagonal_total() == 0);

    const RoiSet unc({{2, 1, 1}}, 2, 2);
    const auto u = build_confusion(pred, unc);
    CHECK(u.has_unclassified());
    CHECK(u.unclassified(0) == 1);
    CHECK(u.total() == 1);
    CHECK(overall_accuracy(u) == 0.0);
    const auto pc = per_class_accuracy(u);
    CHECK(*pc[0].producer == 0.0);
    CHECK_FALSE(pc[0].user.has_value());
}

TEST_CASE("build_confusion matches a brute-force tally") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const auto pred = test::random_map(rng, 8, 8, 4, true);
        std::vector<RoiPixel> ref;
        std::uniform_int_distribution<int> cls(1, 4);
        std::bernoulli_distribution pick(0.6);
        for (std::size_t r = 0; r < 8; ++r)
            for (std::size_t c = 0; c < 8; ++c)
                if (pick(rng)) ref.push_back({static_cast<ClassId>(cls(rng)), r, c});
        if (ref.empty()) continue;
        const RoiSet roi(ref, 8, 8);
        const auto cm = build_confusion(pred, roi);
        const auto t = test::tally_oracle(pred, roi);
        long long seen = 0;
        for (std::size_t j = 0; j < cm.size(); ++j) {
            const int ref_id = cm.class_ids()[j];
            for (std::size_t i = 0; i < cm.size(); ++i) {
                const auto it = t.find({cm.class_ids()[i], ref_id});
                CHECK(cm.at(i, j) == (it == t.end() ? 0 : it->second));
                seen += cm.at(i, j);
            }
            const auto it = t.find({0, ref_id});
            CHECK(cm.unclassified(j) == (it == t.end() ? 0 : it->second));
            seen += cm.unclassified(j);
        }
        CHECK(seen == static_cast<long long>(roi.size()));
    }
}

TEST_CASE("report layout") {
    const auto text = format_accuracy_report(test::to_confusion({{35, 5}, {10, 50}}));
    CHECK(text.rfind("# rows = predicted, columns = reference\n", 0) == 0);
    CHECK(text.find("predicted\\reference,1,2\n1,35,5\n2,10,50\nunclassified,0,0\n") !=
          std::string::npos);
    CHECK(text.find("accuracy,0.85\n") != std::string::npos);
    CHECK(text.find("N,100\n") != std::string::npos);
    CHECK(text.find("PER_CLASS\nclass_id,producer,user\n") != std::string::npos);
}
