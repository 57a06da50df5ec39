#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>

#include "dstbc/builtin_codes.hpp"
#include "dstbc/schedule.hpp"

using namespace dstbc;

TEST_CASE("alamouti schedule") {
    const RelaySchedule sched = derive_relay_schedule(builtin_alamouti());
    REQUIRE(sched.source_modulation.size() == 2);
    CHECK(sched.source_modulation[0] == BlockTransform::idft);
    CHECK(sched.source_modulation[1] == BlockTransform::dft);
    CHECK(sched.reversed_slot == std::vector<bool>{false, true});

    // Relay 1 repeats its block in both slots; relay 2 conjugates with a sign
    // flip in the first slot.
    CHECK_FALSE(sched.actions[0][0].silent);
    CHECK(sched.actions[0][0].block == 0);
    CHECK(sched.actions[0][0].sign == 1);
    CHECK(sched.actions[0][1].block == 1);
    CHECK(sched.actions[0][1].sign == 1);
    CHECK(sched.actions[1][0].block == 1);
    CHECK(sched.actions[1][0].sign == -1);
    CHECK(sched.actions[1][1].block == 0);
    CHECK(sched.actions[1][1].sign == 1);

    CHECK(sched.plain_relays == 1);
    CHECK(sched.relay_order == std::vector<std::size_t>{0, 1});
}

TEST_CASE("six-slot schedule matches the published plan") {
    const RelaySchedule sched = derive_relay_schedule(builtin_example1_r5());
    using BT = BlockTransform;
    CHECK(sched.source_modulation ==
          std::vector<BT>{BT::idft, BT::dft, BT::idft, BT::dft, BT::idft, BT::dft});
    CHECK(sched.reversed_slot == std::vector<bool>{false, true, false, true, false, true});

    // Relay 5 transmits plain blocks in the last two slots and is silent
    // elsewhere.
    for (std::size_t m = 0; m < 4; ++m) CHECK(sched.actions[4][m].silent);
    CHECK(sched.actions[4][4].block == 4);
    CHECK(sched.actions[4][5].block == 5);

    // Middle pair mirrors the leading Alamouti pair two slots later.
    CHECK(sched.actions[2][2].block == 2);
    CHECK(sched.actions[3][2].block == 3);
    CHECK(sched.actions[3][2].sign == -1);
    CHECK(sched.actions[3][3].block == 2);
    CHECK(sched.actions[3][3].sign == 1);

    CHECK(sched.plain_relays == 3);
}

TEST_CASE("four-relay schedule matches the published plan") {
    const RelaySchedule sched = derive_relay_schedule(builtin_fourgroup_r4());
    using BT = BlockTransform;
    CHECK(sched.source_modulation == std::vector<BT>{BT::idft, BT::idft, BT::dft, BT::dft});
    CHECK(sched.reversed_slot == std::vector<bool>{false, false, true, true});

    // Relay 3 sends -r3* in slot 1 and z(r1*) in slot 3.
    CHECK(sched.actions[2][0].block == 2);
    CHECK(sched.actions[2][0].sign == -1);
    CHECK(sched.actions[2][2].block == 0);
    CHECK(sched.actions[2][2].sign == 1);
    CHECK(sched.actions[3][0].block == 3);
    CHECK(sched.actions[3][0].sign == -1);
    CHECK(sched.actions[3][2].block == 1);
    CHECK(sched.actions[3][2].sign == 1);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t m = 0; m < 4; ++m) CHECK_FALSE(sched.actions[i][m].silent);

    CHECK(sched.plain_relays == 2);
    CHECK(sched.relay_order == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(sched.relay_conjugates(2));
    CHECK_FALSE(sched.relay_conjugates(1));
    CHECK(sched.reversed_slots() == std::vector<std::size_t>{2, 3});
}

TEST_CASE("clustered schedule reuses the pair plan per cluster") {
    const RelaySchedule sched = derive_relay_schedule(builtin_clustered_alamouti(4));
    using BT = BlockTransform;
    CHECK(sched.source_modulation == std::vector<BT>{BT::idft, BT::dft, BT::idft, BT::dft});
    CHECK(sched.reversed_slot == std::vector<bool>{false, true, false, true});
    CHECK(sched.actions[0][2].silent);
    CHECK(sched.actions[2][0].silent);
    CHECK(sched.actions[2][2].block == 2);
    CHECK(sched.actions[3][2].sign == -1);
}

TEST_CASE("schedule text rendering") {
    const std::string text = format_schedule(derive_relay_schedule(builtin_fourgroup_r4()));
    CHECK(text.find("blocks: 1:IDFT 2:IDFT 3:DFT 4:DFT") != std::string::npos);
    CHECK(text.find("reversed slots: {3, 4}") != std::string::npos);
    CHECK(text.find("plain relays: 2 of 4") != std::string::npos);
    CHECK(text.find("-r*_{3,3}") != std::string::npos);
    CHECK(text.find("z(r*_{3,1})") != std::string::npos);
    CHECK(text.find("z(r_{1,3})") != std::string::npos);

    const std::string alam = format_schedule(derive_relay_schedule(builtin_alamouti()));
    CHECK(alam.find("r_{1,1}") != std::string::npos);
    CHECK(alam.find("-r*_{2,2}") != std::string::npos);
    CHECK(alam.find("z(r*_{2,1})") != std::string::npos);

    const std::string six = format_schedule(derive_relay_schedule(builtin_example1_r5()));
    CHECK(six.find("0") != std::string::npos);  // silent cells
}

TEST_CASE("hand-built illegal schedule is rejected") {
    RelaySchedule sched = derive_relay_schedule(builtin_alamouti());
    // Flipping one slot's reversal breaks the conjugation parity rule.
    sched.reversed_slot[1] = false;
    CHECK_THROWS_AS(check_schedule_legality(sched), std::runtime_error);
    sched.reversed_slot[1] = true;
    CHECK_NOTHROW(check_schedule_legality(sched));
    // Flipping a block's modulation breaks it too.
    sched.source_modulation[0] = BlockTransform::dft;
    CHECK_THROWS_AS(check_schedule_legality(sched), std::runtime_error);
}

TEST_CASE("code with no consistent slot assignment") {
    // Passes the row conditions yet the induced parity constraints conflict:
    // relay 1 ties both symbols to their own slots, relay 3 ties s1 to slot 2
    // as well, and relay 2's conjugated s2 in slot 1 closes an odd cycle.
    ConjugateLinearCode code;
    code.name = "conflict";
    code.relays = 3;
    code.slots = 2;
    code.symbols = 2;
    code.columns.resize(3);
    code.columns[0].conjugated = false;
    code.columns[0].a = {1.0, 0.0, 0.0, 1.0};
    code.columns[1].conjugated = true;
    code.columns[1].a = {0.0, 1.0, 0.0, 0.0};
    code.columns[2].conjugated = false;
    code.columns[2].a = {0.0, 0.0, 1.0, 0.0};
    REQUIRE(validate_code(code).empty());
    REQUIRE(check_row_conditions(row_partitions(code)).schedule_gates_pass());
    CHECK_THROWS_AS(derive_relay_schedule(code), std::runtime_error);
}

TEST_CASE("row condition failure blocks derivation") {
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
    REQUIRE(validate_code(code).empty());
    CHECK_THROWS_AS(derive_relay_schedule(code), std::invalid_argument);
}

TEST_CASE("structurally invalid code is rejected up front") {
    ConjugateLinearCode code = builtin_alamouti();
    code.columns[0].a = {1.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(derive_relay_schedule(code), std::invalid_argument);
}
