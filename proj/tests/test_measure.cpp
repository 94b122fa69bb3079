#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "xprob/measure.hpp"

using namespace xprob;
using testsupport::numbered_space;
using testsupport::random_event;
using testsupport::random_valid_measure;

namespace {

ExtendedMeasure quarters() {
    return ExtendedMeasure::create(numbered_space(4), {0.25, 0.25, -0.25, -0.25});
}

ExtendedMeasure tenths() {
    return ExtendedMeasure::create(numbered_space(4), {0.4, 0.3, -0.2, -0.1});
}

} // namespace

TEST_CASE("event evaluation sums atoms") {
    const auto P = quarters();
    CHECK(P.eval(Event::of({0, 1})) == 0.5);
    CHECK(P.eval(Event::none()) == 0.0);
    CHECK(P.eval(Event::full(P.space())) == 0.0); // the no-sufficient-information case
    CHECK(tenths().eval(Event::full(P.space())) == Catch::Approx(0.4));
    CHECK_THROWS_AS(P.eval(Event::of({5})), invalid_event_error);
}

TEST_CASE("complement follows the total minus the event") {
    const auto P = quarters();
    CHECK(P.complement(Event::of({2, 3})) == 0.5);
    CHECK(P.complement(Event::full(P.space())) == 0.0);
    CHECK(tenths().complement(Event::of({0})) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("conditional values divide by the conditioning event") {
    const auto P = quarters();
    CHECK(P.conditional(Event::of({0}), Event::of({0, 1})) == 0.5);
    // ratio of two negatives is positive
    CHECK(P.conditional(Event::of({2}), Event::of({2, 3})) == 0.5);
    // A containing B gives exactly 1
    CHECK(tenths().conditional(Event::of({0, 1, 2}), Event::of({0, 1})) == 1.0);
    CHECK_THROWS_AS(P.conditional(Event::of({0}), Event::full(P.space())),
                    conditioning_on_null_error);
}

TEST_CASE("conditioning on a mixed-sign event can leave the unit range") {
    // {1,3} evaluates to .2 while the contained {1} evaluates to .4.
    const auto P = tenths();
    CHECK(P.conditional(Event::of({0}), Event::of({0, 2})) == Catch::Approx(2.0));
}

TEST_CASE("independence compares absolute values") {
    const auto P = quarters();
    CHECK(P.is_independent(Event::of({0, 2}), Event::of({1, 3}), 1e-12));
    const auto regular = ExtendedMeasure::create(numbered_space(4), {0.5, 0.5, 0.0, 0.0});
    CHECK(regular.is_independent(Event::full(regular.space()), Event::of({0}), 1e-12));
    CHECK_FALSE(tenths().is_independent(Event::of({0}), Event::of({1}), 1e-12));
    CHECK_THROWS_AS(P.is_independent(Event::of({0}), Event::of({1}), 0.0), validation_error);
}

TEST_CASE("validation reports per-axiom residuals") {
    CHECK(quarters().validate().pass);
    CHECK(ExtendedMeasure::create(numbered_space(4), {0.5, 0.5, 0.0, 0.0}).validate().pass);

    const auto bad = ExtendedMeasure::create_relaxed(numbered_space(4), {0.5, 0.6, -0.2, -0.1});
    const auto rep = bad.validate();
    CHECK_FALSE(rep.pass);
    const auto* abs_sum = rep.find("iii* absolute sum");
    REQUIRE(abs_sum != nullptr);
    CHECK_FALSE(abs_sum->pass);
    CHECK(abs_sum->residual == Catch::Approx(0.4));
}

TEST_CASE("strict construction rejects axiom violations") {
    CHECK_THROWS_AS(ExtendedMeasure::create(numbered_space(2), {1.2, -0.2}), validation_error);
    CHECK_THROWS_AS(ExtendedMeasure::create(numbered_space(2), {0.5, 0.4}), validation_error);
    CHECK_THROWS_AS(ExtendedMeasure::create(numbered_space(3), {0.5, 0.5}), validation_error);
    CHECK_NOTHROW(ExtendedMeasure::create(numbered_space(2), {-0.5, 0.5}));
}

TEST_CASE("additivity and inclusion-exclusion are exact on the dyadic grid") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 16;
        const auto P = random_valid_measure(rng, n);
        const Event A = random_event(rng, n);
        const Event B = random_event(rng, n);
        const Event disjoint_b = B - A;

        CHECK(P.eval(A | disjoint_b) == P.eval(A) + P.eval(disjoint_b));
        CHECK(P.eval(A | B) == P.eval(A) + P.eval(B) - P.eval(A & B));
        CHECK(P.complement(A) == P.eval(A.complement(P.space())));
    }
}

TEST_CASE("monotonicity holds under the sign guards") {
    std::mt19937_64 rng(12);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 2 + rng() % 10;
        const auto P = random_valid_measure(rng, n);
        const Event B = random_event(rng, n);
        const Event A = Event{B.mask() & rng()};
        const double pa = P.eval(A), pb = P.eval(B), pd = P.eval(B - A);
        if (pa >= 0.0 && pb >= 0.0 && pd >= 0.0) {
            CHECK(pa <= pb);
            ++checked;
        }
        if (pa <= 0.0 && pb <= 0.0 && pd <= 0.0) {
            CHECK(pa >= pb);
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("nested chains with nonnegative values reach exactly zero") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 10;
        const auto P = random_valid_measure(rng, n);

        // Strip atoms one at a time down to the empty event.
        std::vector<Event> chain{random_event(rng, n)};
        while (!chain.back().empty()) {
            const auto idx = chain.back().indices();
            chain.push_back(chain.back() - Event::single(idx[rng() % idx.size()]));
        }

        bool all_nonneg = true;
        for (Event A : chain)
            all_nonneg = all_nonneg && P.eval(A) >= 0.0;
        CHECK(P.eval(chain.back()) == 0.0);
        if (all_nonneg) {
            // with nonnegative differences the values cannot increase
            for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
                const double step = P.eval(chain[j] - chain[j + 1]);
                if (step >= 0.0)
                    CHECK(P.eval(chain[j + 1]) <= P.eval(chain[j]));
            }
        }
    }
}

TEST_CASE("covers inside one sign class bound the covered event") {
    std::mt19937_64 rng(14);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 3 + rng() % 8;
        const Event actual = testsupport::random_nonempty_event(rng, n);
        const Split split = Split::initial(actual, numbered_space(n));
        const auto P = testsupport::random_split_measure(rng, split, n);

        // union inside the nonnegative family
        const Event U{split.actual().mask() & rng()};
        if (U.empty())
            continue;
        const Event A1{U.mask() & rng()};
        const Event A2{U.mask() & rng()};
        const Event A = Event{(A1 | A2).mask() & rng()};
        if (!A.subset_of(A1 | A2))
            continue;
        CHECK(P.eval(A) <= P.eval(A1) + P.eval(A2) + 1e-15);

        // mirrored on the latent side
        const Event V{split.latent().mask() & rng()};
        if (!V.empty()) {
            const Event B1{V.mask() & rng()};
            const Event B2{V.mask() & rng()};
            const Event B = Event{(B1 | B2).mask() & rng()} & (B1 | B2);
            CHECK(P.eval(B) >= P.eval(B1) + P.eval(B2) - 1e-15);
        }
        ++checked;
    }
    CHECK(checked > 50);
}
