#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace kf_test;

namespace {

std::vector<Task> const& lane_of(Schedule const& s, Instance const& inst, std::string const& zone) {
    return s.lanes[zone_index(inst, zone)];
}

Minutes span(Task const& t) { return t.end - t.start; }

// Two zones "A" and "B" with optional exclusion and a Water -> Pasta chain.
Scenario two_zone_scenario(bool exclusive) {
    Scenario s;
    s.resources = {{"A", "P"}, {"B", "P"}};
    if (exclusive) s.exclusion_groups = {{{"A", "B"}}};
    s.recipes.push_back(make_recipe("Water", "A", {"A", "B"}, 1000, 15, 350, 5));
    s.recipes.push_back(make_recipe("Pasta", "A", {"A", "B"}, 100, 30, 840, 2, "Water A"));
    s.recipes.push_back(make_recipe("Tea", "A", {"A", "B"}, 100, 20, 100, 1));
    s.order = {{"Pasta", 100}, {"Tea", 200}};
    return s;
}

} // namespace

TEST(SubtaskDuration, TenPercentRoundedDownAtLeastOne) {
    EXPECT_EQ(subtask_duration(120), 12);
    EXPECT_EQ(subtask_duration(20), 2);
    EXPECT_EQ(subtask_duration(5), 1);
    EXPECT_EQ(subtask_duration(50), 5);
    EXPECT_EQ(subtask_duration(1), 1);
}

TEST(Decode, HobTwoSequence) {
    Instance inst(catalog::single_hob_scenario());
    auto c = chromosome_for(inst, {{"Boiled water A 1", "Hob(1)"},
                                   {"Rice A 1", "Hob(2)"},
                                   {"Beef A 2", "Hob(2)"},
                                   {"Boiled water A 0", "Hob(2)"},
                                   {"Pasta A 0", "Hob(2)"}});
    auto schedule = decode(c, inst);
    ASSERT_EQ(schedule.status, ScheduleStatus::Succeeded);
    auto const& lane = lane_of(schedule, inst, "Hob(2)");
    std::vector<std::string> names;
    for (auto const& t : lane) names.push_back(task_name(t, inst));
    EXPECT_EQ(names, (std::vector<std::string>{"Rice A 1_1", "Rice A 1", "DependentSetUp from Rice A to Beef A",
                                               "Beef A 2_1", "Beef A 2", "DependentSetUp from Beef A to Boiled water A",
                                               "Boiled water A 0", "DependentSetUp from Boiled water A to Pasta A",
                                               "Pasta A 0_1", "Pasta A 0"}));
    EXPECT_EQ(span(lane[4]), 120);
    EXPECT_EQ(span(lane[3]), 12);
    EXPECT_EQ(span(lane[5]), 10);
    EXPECT_EQ(span(lane[6]), 15);
    EXPECT_EQ(span(lane[7]), 10);
    EXPECT_EQ(span(lane[8]), 3);
    EXPECT_EQ(span(lane[9]), 30);
    // rice waits for the water on Hob(1) to finish at 15
    EXPECT_EQ(lane[0].start, 0);
    EXPECT_EQ(lane[1].start, 15);
    EXPECT_TRUE(audit_schedule(schedule, c, inst).empty());
}

TEST(Decode, AllUnallocatedIsEmpty) {
    Instance inst(catalog::single_hob_scenario());
    auto c = all_unallocated(inst);
    auto schedule = decode(c, inst);
    EXPECT_TRUE(schedule.empty());
    auto v = evaluate(schedule, inst);
    EXPECT_EQ(v.makespan, 0);
    EXPECT_EQ(v.energy, 0);
    EXPECT_DOUBLE_EQ(v.coverage_shortfall, 10000);
    EXPECT_FALSE(v.feasible());
}

TEST(Decode, ExclusionSerializesConflictingZones) {
    Instance free_inst(two_zone_scenario(false));
    Instance excl_inst(two_zone_scenario(true));
    auto placements = std::vector<std::pair<std::string, std::string>>{{"Tea A 0", "A"}, {"Tea A 1", "B"}};
    auto a = decode(chromosome_for(free_inst, placements), free_inst);
    EXPECT_EQ(schedule_makespan(a), 20);
    auto b = decode(chromosome_for(excl_inst, placements), excl_inst);
    EXPECT_EQ(schedule_makespan(b), 40);
    EXPECT_EQ(lane_of(b, excl_inst, "B")[0].start, 20);
}

TEST(Decode, SuccessorWaitsForPredecessorEvenAtHigherPriority) {
    Instance inst(two_zone_scenario(false));
    auto c = chromosome_for(inst, {{"Pasta A 0", "A"}, {"Water A 0", "B"}});
    auto schedule = decode(c, inst);
    ASSERT_EQ(schedule.status, ScheduleStatus::Succeeded);
    auto const& a = lane_of(schedule, inst, "A");
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[0].kind, TaskKind::Subtask);
    EXPECT_EQ(a[0].start, 0); // the subtask does not wait for the predecessor
    EXPECT_EQ(a[1].start, 15);
    EXPECT_EQ(a[1].end, 45);
}

TEST(Decode, MissingPredecessorIsInfeasible) {
    Instance inst(two_zone_scenario(false));
    auto c = chromosome_for(inst, {{"Pasta A 0", "A"}});
    auto schedule = decode(c, inst);
    EXPECT_EQ(schedule.status, ScheduleStatus::Infeasible);
    EXPECT_EQ(schedule.reason, "circular-predecessor");
    EXPECT_FALSE(evaluate(schedule, inst).schedulable);
}

TEST(Decode, PrioritySwapChangesOrderNotTotals) {
    Instance inst(two_zone_scenario(false));
    auto first = chromosome_for(inst, {{"Tea A 0", "A"}, {"Tea A 1", "A"}, {"Water A 0", "A"}, {"Pasta A 0", "A"}});
    auto second = first;
    std::swap(second.genes[*inst.find_slot("Tea A 0")].priority, second.genes[*inst.find_slot("Water A 0")].priority);
    auto s1 = decode(first, inst);
    auto s2 = decode(second, inst);
    EXPECT_NE(s1, s2);
    auto v1 = evaluate(s1, inst);
    auto v2 = evaluate(s2, inst);
    EXPECT_EQ(v1.energy, v2.energy);
    EXPECT_EQ(v1.deficiency, v2.deficiency);
    EXPECT_EQ(lane_of(s2, inst, "A")[0].slot, *inst.find_slot("Water A 0"));
}

TEST(Decode, SetupOnlyBetweenDifferentRecipes) {
    Instance inst(two_zone_scenario(false));
    auto c = chromosome_for(inst, {{"Tea A 0", "A"}, {"Tea A 1", "A"}, {"Water A 0", "A"}});
    auto lane = lane_of(decode(c, inst), inst, "A");
    ASSERT_EQ(lane.size(), 4u);
    EXPECT_EQ(lane[1].kind, TaskKind::Main);
    EXPECT_EQ(lane[1].start, 20);
    EXPECT_EQ(lane[2].kind, TaskKind::Setup);
    EXPECT_EQ(span(lane[2]), 10);
}

TEST(Decode, ZeroSetupDurationEmitsNoSetup) {
    auto s = two_zone_scenario(false);
    s.setup_duration = 0;
    Instance inst(s);
    auto c = chromosome_for(inst, {{"Tea A 0", "A"}, {"Water A 0", "A"}});
    EXPECT_EQ(lane_of(decode(c, inst), inst, "A").size(), 2u);
}

TEST(Decode, DurationOverrideChangesMainSpan) {
    auto s = apply_effect(catalog::single_hob_scenario(), DurationOverride{"Boiled water A", "Hob(1)", "Pot(1)", 0, 40});
    Instance inst(s);
    auto c = chromosome_for(inst, {{"Boiled water A 0", "Hob(1)"}, {"Boiled water A 1", "Hob(2)"}});
    auto schedule = decode(c, inst);
    EXPECT_EQ(span(lane_of(schedule, inst, "Hob(1)")[0]), 40);
    EXPECT_EQ(span(lane_of(schedule, inst, "Hob(2)")[0]), 15);
}

TEST(Decode, IsDeterministic) {
    Instance inst(catalog::single_hob_scenario());
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        auto c = repair(random_chromosome(inst, rng), inst, rng);
        EXPECT_EQ(decode(c, inst), decode(c, inst));
    }
}

TEST(Decode, RandomChromosomesProduceValidSchedules) {
    std::mt19937_64 rng(11);
    for (auto const& scenario : {catalog::single_hob_scenario(), catalog::four_hob_scenario()}) {
        Instance inst(scenario);
        for (int i = 0; i < 200; ++i) {
            auto c = random_chromosome(inst, rng);
            if (i % 2) c = repair(c, inst, rng);
            auto schedule = decode(c, inst);
            auto problems = audit_schedule(schedule, c, inst);
            ASSERT_TRUE(problems.empty()) << problems.front();
            auto v = evaluate(schedule, inst);
            auto w = reaccumulate(schedule, inst);
            EXPECT_TRUE(close_rel(v.energy, w.energy));
            EXPECT_TRUE(close_rel(v.deficiency, w.deficiency));
            EXPECT_TRUE(close_rel(v.cost, w.cost));
            EXPECT_EQ(v.makespan, w.makespan);
            EXPECT_TRUE(close_rel(v.coverage_shortfall, w.coverage_shortfall));
        }
    }
}

TEST(Evaluate, SumsExecutedMains) {
    Instance inst(two_zone_scenario(false));
    auto c = chromosome_for(inst, {{"Water A 0", "A"}, {"Pasta A 0", "B"}, {"Tea A 0", "A"}});
    auto v = assess(c, inst);
    EXPECT_DOUBLE_EQ(v.energy, 350 + 840 + 100);
    EXPECT_DOUBLE_EQ(v.deficiency, 5 + 2 + 1);
    EXPECT_DOUBLE_EQ(v.cost, 0.01 * (350 + 840 + 100));
    EXPECT_DOUBLE_EQ(v.coverage_shortfall, 100); // one tea short
    // water [0,15) on A, pasta subtask [0,3) then main [15,45) on B
    EXPECT_EQ(v.makespan, 45);
}

TEST(Repair, FillsShortfallWithRunnableSlots) {
    Instance inst(catalog::single_hob_scenario());
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        auto c = repair(all_unallocated(inst), inst, rng);
        ASSERT_TRUE(valid_for(inst, c));
        auto v = assess(c, inst);
        EXPECT_TRUE(v.feasible()) << "shortfall " << v.coverage_shortfall;
        double pasta = 0;
        for (std::size_t s = 0; s < inst.slot_count(); ++s) {
            if (is_allocated(inst, c, s) && inst.recipe_of(s).food == "Pasta") pasta += inst.recipe_of(s).amount_g;
        }
        EXPECT_GE(pasta, 1000);
    }
}

TEST(Repair, LeavesCoveredChromosomeUnchanged) {
    Instance inst(catalog::single_hob_scenario());
    std::mt19937_64 rng(2);
    auto c = repair(all_unallocated(inst), inst, rng);
    auto again = repair(c, inst, rng);
    EXPECT_EQ(again, c);
}

TEST(Repair, DropsAllocationsOfUnrunnableRecipes) {
    auto s = two_zone_scenario(false);
    s.recipes[0].zones = {"B"};
    s = apply_effect(s, ResourceUnavailable{"B"});
    Instance inst(s);
    auto pasta = *inst.scenario().find_recipe("Pasta A");
    EXPECT_FALSE(inst.runnable(pasta));
    std::mt19937_64 rng(4);
    auto c = chromosome_for(inst, {{"Pasta A 0", "A"}});
    auto r = repair(c, inst, rng);
    EXPECT_FALSE(is_allocated(inst, r, *inst.find_slot("Pasta A 0")));
    EXPECT_EQ(decode(r, inst).status, ScheduleStatus::Succeeded);
}

TEST(Repair, AddsPredecessorForAllocatedSuccessor) {
    Instance inst(two_zone_scenario(false));
    std::mt19937_64 rng(9);
    auto c = chromosome_for(inst, {{"Pasta A 0", "A"}, {"Tea A 0", "A"}, {"Tea A 1", "B"}});
    auto r = repair(c, inst, rng);
    EXPECT_TRUE(is_allocated(inst, r, *inst.find_slot("Water A 0")));
    EXPECT_EQ(decode(r, inst).status, ScheduleStatus::Succeeded);
}
