#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "dstbc/builtin_codes.hpp"
#include "dstbc/code.hpp"

using namespace dstbc;

TEST_CASE("builtin codes are structurally valid") {
    CHECK(validate_code(builtin_alamouti()).empty());
    CHECK(validate_code(builtin_example1_r5()).empty());
    CHECK(validate_code(builtin_fourgroup_r4()).empty());
    CHECK(validate_code(builtin_clustered_alamouti(4)).empty());
    CHECK(validate_code(builtin_clustered_alamouti(6)).empty());
    CHECK_THROWS_AS(builtin_clustered_alamouti(3), std::invalid_argument);
}

TEST_CASE("structural violations are reported, not thrown") {
    ConjugateLinearCode code = builtin_alamouti();
    code.columns[0].a = {1.0, 1.0, 0.0, 1.0};  // row 1 has two nonzeros
    const auto bad = validate_code(code);
    REQUIRE_FALSE(bad.empty());
    CHECK(bad.front().find("more than one nonzero") != std::string::npos);

    ConjugateLinearCode scaled = builtin_alamouti();
    scaled.columns[1].a = {0.0, -2.0, 1.0, 0.0};
    CHECK_FALSE(validate_code(scaled).empty());

    ConjugateLinearCode short_col = builtin_alamouti();
    short_col.columns[0].a = {1.0, 0.0};
    CHECK_FALSE(validate_code(short_col).empty());

    ConjugateLinearCode bad_groups = builtin_alamouti();
    bad_groups.groups = {{0, 1}, {1, 2, 3}};
    CHECK_FALSE(validate_code(bad_groups).empty());
}

TEST_CASE("alamouti codeword matrix") {
    const ConjugateLinearCode code = builtin_alamouti();
    const cvec s = {cx(1.0, 2.0), cx(3.0, -1.0)};
    const CMat x = codeword(code, s);
    CHECK(x(0, 0) == s[0]);
    CHECK(x(1, 0) == s[1]);
    CHECK(x(0, 1) == -std::conj(s[1]));
    CHECK(x(1, 1) == std::conj(s[0]));
}

TEST_CASE("basis probes of the four-relay code") {
    const ConjugateLinearCode code = builtin_fourgroup_r4();
    const cvec e1 = {1.0, 0.0, 0.0, 0.0};
    const CMat x = codeword(code, e1);
    // Column j equals column 1 of A_j (real symbol, so conjugation is moot).
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t m = 0; m < 4; ++m) CHECK(x(m, j) == cx(code.a(j, m, 0), 0.0));

    // Frozen matrices for the non-identity columns.
    const ConjugateLinearCode expect = code;
    CHECK(expect.columns[1].a == std::vector<double>{0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
    CHECK(expect.columns[2].a == std::vector<double>{0, 0, -1, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0, 1, 0, 0});
    CHECK(expect.columns[3].a == std::vector<double>{0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0});
    CHECK_FALSE(expect.columns[0].conjugated);
    CHECK_FALSE(expect.columns[1].conjugated);
    CHECK(expect.columns[2].conjugated);
    CHECK(expect.columns[3].conjugated);
}

TEST_CASE("six-slot code places a lone symbol at the top left") {
    const ConjugateLinearCode code = builtin_example1_r5();
    cvec e1(6, cx(0.0, 0.0));
    e1[0] = 1.0;
    const CMat x = codeword(code, e1);
    CHECK(x(0, 0) == cx(1.0, 0.0));
    double rest = 0.0;
    for (std::size_t m = 0; m < 6; ++m)
        for (std::size_t j = 0; j < 5; ++j)
            if (!(m == 0 && j == 0)) rest += std::abs(x(m, j));
    // s1 also appears conjugated in slot 2 via relay 2.
    CHECK(x(1, 1) == cx(1.0, 0.0));
    CHECK(rest == Catch::Approx(1.0));
}

TEST_CASE("row partitions") {
    const RowPartition alam = row_partitions(builtin_alamouti());
    CHECK(alam.plain[0] == std::vector<std::size_t>{0});
    CHECK(alam.conjugated[0] == std::vector<std::size_t>{1});
    CHECK(alam.plain[1] == std::vector<std::size_t>{1});
    CHECK(alam.conjugated[1] == std::vector<std::size_t>{0});

    const RowPartition ex1 = row_partitions(builtin_example1_r5());
    CHECK(ex1.plain[4] == std::vector<std::size_t>{4});
    CHECK(ex1.conjugated[4].empty());
    CHECK(ex1.plain[5] == std::vector<std::size_t>{5});
    CHECK(ex1.conjugated[5].empty());
}

TEST_CASE("row conditions: alamouti passes everything") {
    const RowConditionReport rep = check_row_conditions(row_partitions(builtin_alamouti()));
    CHECK(rep.disjoint);
    CHECK(rep.balanced);
    CHECK(rep.laminar);
    CHECK(rep.schedule_gates_pass());
    CHECK(rep.notes.empty());
}

TEST_CASE("row conditions: six-slot code fails only the balance check") {
    const RowConditionReport rep = check_row_conditions(row_partitions(builtin_example1_r5()));
    CHECK(rep.disjoint);
    CHECK(rep.laminar);
    CHECK_FALSE(rep.balanced);
    CHECK(rep.schedule_gates_pass());
    bool row5 = false, row6 = false;
    for (const auto& n : rep.notes) {
        if (n.find("row 5") != std::string::npos) row5 = true;
        if (n.find("row 6") != std::string::npos) row6 = true;
    }
    CHECK(row5);
    CHECK(row6);
}

TEST_CASE("row conditions: symbol appearing plain and conjugated in one row") {
    ConjugateLinearCode code;
    code.name = "clash";
    code.relays = 2;
    code.slots = 1;
    code.symbols = 1;
    code.columns.resize(2);
    code.columns[0].conjugated = false;
    code.columns[0].a = {1.0};
    code.columns[1].conjugated = true;
    code.columns[1].a = {1.0};
    const RowConditionReport rep = check_row_conditions(row_partitions(code));
    CHECK_FALSE(rep.disjoint);
    CHECK_FALSE(rep.schedule_gates_pass());
}

TEST_CASE("json round trip") {
    for (const ConjugateLinearCode& code :
         {builtin_alamouti(), builtin_example1_r5(), builtin_fourgroup_r4(), builtin_clustered_alamouti(4)}) {
        const nlohmann::json j = code_to_json(code);
        const ConjugateLinearCode back = code_from_json(j);
        CHECK(back.relays == code.relays);
        CHECK(back.slots == code.slots);
        CHECK(back.symbols == code.symbols);
        CHECK(back.groups == code.groups);
        REQUIRE(back.columns.size() == code.columns.size());
        for (std::size_t jcol = 0; jcol < code.columns.size(); ++jcol) {
            CHECK(back.columns[jcol].conjugated == code.columns[jcol].conjugated);
            CHECK(back.columns[jcol].a == code.columns[jcol].a);
        }
    }
}

TEST_CASE("json schema enforcement") {
    CHECK_THROWS_AS(code_from_json(nlohmann::json::parse("{\"R\":2}")), std::invalid_argument);
    // Entry outside {0, ±1} passes parsing but fails validation.
    nlohmann::json j = code_to_json(builtin_alamouti());
    j["columns"][0]["A"][0] = 3;
    CHECK_THROWS_AS(code_from_json(j), std::invalid_argument);
}

TEST_CASE("code hash distinguishes codes and is stable") {
    const std::string h1 = code_hash(builtin_alamouti());
    const std::string h2 = code_hash(builtin_fourgroup_r4());
    CHECK(h1 != h2);
    CHECK(h1 == code_hash(builtin_alamouti()));
}

TEST_CASE("rank criterion across the builtins") {
    // Exhaustive difference-rank checks; these are the diversity guarantees.
    const RankReport alam = check_full_rank(builtin_alamouti(), constellation_for(builtin_alamouti()));
    CHECK(alam.full);
    CHECK(alam.min_rank == 2);
    CHECK(alam.pairs_checked == 120);  // C(16,2)

    const RankReport four = check_full_rank(builtin_fourgroup_r4(), constellation_for(builtin_fourgroup_r4()));
    CHECK(four.full);
    CHECK(four.min_rank == 4);

    const RankReport clus =
        check_full_rank(builtin_clustered_alamouti(4), constellation_for(builtin_clustered_alamouti(4)));
    CHECK_FALSE(clus.full);
    CHECK(clus.min_rank == 2);
}

TEST_CASE("rotation is what rescues full rank") {
    // With unrotated QPSK on the interleaved groups, differences with equal
    // coordinate magnitudes collapse the codeword difference to rank 2.
    ConjugateLinearCode code = builtin_fourgroup_r4();
    const auto pts = qpsk_points();
    code.signal_sets = {pts, pts, pts, pts};
    const RankReport rep = check_full_rank(code, constellation_for(code));
    CHECK_FALSE(rep.full);
    CHECK(rep.min_rank == 2);
}

TEST_CASE("plain column count") {
    CHECK(builtin_alamouti().plain_count() == 1);
    CHECK(builtin_fourgroup_r4().plain_count() == 2);
    CHECK(builtin_example1_r5().plain_count() == 3);
    CHECK(builtin_clustered_alamouti(4).plain_count() == 2);
}
