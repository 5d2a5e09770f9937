#include "tmforge/model.hpp"

#include <algorithm>

#include "doctest.h"
#include "support/generators.hpp"

using namespace tmforge;

namespace {

DfdModel minimal_model() {
    DfdModel model;
    model.title = "m";
    DfdLevel level;
    level.rank = 0;
    level.elements.push_back({"E1", ElementKind::ExternalEntity, "User", false, {}, {}});
    level.elements.push_back({"P1", ElementKind::Process, "Cloud", false, {}, {}});
    level.flows.push_back({"F1", "E1", "P1", "request", {}});
    model.levels.push_back(std::move(level));
    return model;
}

}  // namespace

TEST_CASE("minimal well-formed model validates cleanly") {
    CHECK(validate_model(minimal_model()).empty());
}

TEST_CASE("dangling flow destination yields one error naming the flow") {
    DfdModel model = minimal_model();
    model.levels[0].flows[0].dst = "P9";
    const auto diagnostics = validate_model(model);
    REQUIRE(diagnostics.size() == 1);
    CHECK(diagnostics[0].severity == Severity::Error);
    CHECK(diagnostics[0].subject == "F1");
    CHECK(diagnostics[0].message.find("P9") != std::string::npos);
}

TEST_CASE("duplicate element id yields one error naming the id") {
    DfdModel model = minimal_model();
    model.levels[0].elements.push_back({"P1", ElementKind::Process, "Again", false, {}, {}});
    const auto diagnostics = validate_model(model);
    REQUIRE(diagnostics.size() == 1);
    CHECK(diagnostics[0].subject == "P1");
    CHECK(diagnostics[0].message.find("duplicate") != std::string::npos);
}

TEST_CASE("log flag is rejected outside data stores") {
    DfdModel model = minimal_model();
    model.levels[0].elements[1].is_log_store = true;
    const auto diagnostics = validate_model(model);
    REQUIRE(diagnostics.size() == 1);
    CHECK(diagnostics[0].subject == "P1");
}

TEST_CASE("wrong id prefix for the element kind is an error") {
    DfdModel model = minimal_model();
    model.levels[0].elements[0].id = "P7";
    model.levels[0].flows[0].src = "P7";
    const auto diagnostics = validate_model(model);
    REQUIRE(!diagnostics.empty());
    CHECK(diagnostics[0].subject == "P7");
}

TEST_CASE("flow crossing set must match the boundary symmetric difference") {
    DfdModel model = minimal_model();
    model.levels[0].boundaries.push_back({"B1", "perimeter", {}});
    model.levels[0].elements[1].boundary_ids = {"B1"};
    refresh_derived(model);
    REQUIRE(validate_model(model).empty());
    CHECK(model.levels[0].flows[0].crosses == std::vector<std::string>{"B1"});

    model.levels[0].flows[0].crosses.clear();
    const auto diagnostics = validate_model(model);
    REQUIRE(diagnostics.size() == 1);
    CHECK(diagnostics[0].subject == "F1");
    CHECK(diagnostics[0].message.find("out of sync") != std::string::npos);
}

TEST_CASE("validation is pure and deterministic") {
    DfdModel model = minimal_model();
    model.levels[0].flows[0].dst = "P9";
    model.levels[0].elements.push_back({"E1", ElementKind::ExternalEntity, "dup", false, {}, {}});
    const auto first = validate_model(model);
    const auto second = validate_model(model);
    REQUIRE(first.size() == second.size());
    for (size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].message == second[i].message);
        CHECK(first[i].subject == second[i].subject);
    }
}

TEST_CASE("level ranks must be contiguous from zero") {
    DfdModel model = minimal_model();
    model.levels[0].rank = 1;
    const auto diagnostics = validate_model(model);
    REQUIRE(!diagnostics.empty());
    CHECK(diagnostics.back().message.find("contiguous") != std::string::npos);
}

TEST_CASE("soundness requires a clean model first") {
    DfdModel model = minimal_model();
    model.levels[0].flows[0].dst = "P9";
    CHECK_THROWS_AS(check_refinement_soundness(model), InputError);
}

TEST_CASE("identity refinement is always sound") {
    tmftest::Rng rng(41);
    for (int i = 0; i < 25; ++i) {
        DfdModel model;
        model.title = "identity";
        model.levels.push_back(tmftest::gen_level(rng, 0));
        DfdLevel copy = model.levels[0];
        copy.rank = 1;
        model.levels.push_back(copy);
        for (const Element& e : model.levels[0].elements) {
            model.refinements.push_back({0, e.id, {e.id}});
        }
        refresh_derived(model);
        REQUIRE(validate_model(model).empty());
        CHECK(check_refinement_soundness(model).empty());
    }
}

TEST_CASE("unrefined element is reported by id") {
    DfdModel model = minimal_model();
    DfdLevel child;
    child.rank = 1;
    child.elements.push_back({"E2", ElementKind::ExternalEntity, "child", false, {}, {}});
    child.elements.push_back({"P2", ElementKind::Process, "child", false, {}, {}});
    child.flows.push_back({"F1", "E2", "P2", "request", {}});
    model.levels.push_back(std::move(child));
    model.refinements.push_back({0, "E1", {"E2"}});
    model.refinements.push_back({0, "P1", {"P2"}});
    REQUIRE(validate_model(model).empty());
    CHECK(check_refinement_soundness(model).empty());

    SUBCASE("dropping a refinement link reports the parent") {
        model.refinements.pop_back();  // P1 unrefined
        const auto diagnostics = check_refinement_soundness(model);
        // the orphaned child only warns; exactly one error names P1
        std::vector<Diagnostic> errors;
        std::copy_if(diagnostics.begin(), diagnostics.end(), std::back_inserter(errors),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].subject == "P1");
    }
    SUBCASE("dropping the covering flow reports the parent flow") {
        model.levels[1].flows.clear();
        const auto diagnostics = check_refinement_soundness(model);
        REQUIRE(diagnostics.size() == 1);
        CHECK(diagnostics[0].severity == Severity::Error);
        CHECK(diagnostics[0].subject == "F1");
        CHECK(diagnostics[0].level_rank == 0);
    }
    SUBCASE("an unparented deeper element is a warning, not an error") {
        model.levels[1].elements.push_back(
            {"D5", ElementKind::DataStore, "internal cache", false, {}, {}});
        const auto diagnostics = check_refinement_soundness(model);
        REQUIRE(diagnostics.size() == 1);
        CHECK(diagnostics[0].severity == Severity::Warning);
        CHECK(diagnostics[0].subject == "D5");
    }
}

TEST_CASE("deleting any single covering flow or link breaks soundness exactly once") {
    tmftest::Rng rng(1234);
    for (int round = 0; round < 30; ++round) {
        const tmftest::SoundModel sound = tmftest::gen_sound_two_level_model(rng);
        REQUIRE(validate_model(sound.model).empty());
        REQUIRE(check_refinement_soundness(sound.model).empty());

        for (const std::string& flow_id : sound.covering_flow_ids) {
            DfdModel mutated = sound.model;
            auto& flows = mutated.levels[1].flows;
            flows.erase(std::remove_if(flows.begin(), flows.end(),
                                       [&](const DataFlow& f) { return f.id == flow_id; }),
                        flows.end());
            const auto diagnostics = check_refinement_soundness(mutated);
            long errors = std::count_if(diagnostics.begin(), diagnostics.end(),
                                        [](const Diagnostic& d) {
                                            return d.severity == Severity::Error;
                                        });
            CHECK(errors == 1);
        }
        for (size_t i = 0; i < sound.model.refinements.size(); ++i) {
            DfdModel mutated = sound.model;
            const std::string parent = mutated.refinements[i].parent_id;
            mutated.refinements.erase(mutated.refinements.begin() +
                                      static_cast<long>(i));
            const auto diagnostics = check_refinement_soundness(mutated);
            std::vector<Diagnostic> errors;
            std::copy_if(diagnostics.begin(), diagnostics.end(), std::back_inserter(errors),
                         [](const Diagnostic& d) { return d.severity == Severity::Error; });
            REQUIRE(errors.size() == 1);
            CHECK(errors[0].subject == parent);
        }
    }
}

TEST_CASE("crosses recomputed from boundaries equals the stored value on generated models") {
    tmftest::Rng rng(77);
    for (int i = 0; i < 100; ++i) {
        const DfdModel model = tmftest::gen_model(rng);
        REQUIRE(validate_model(model).empty());
        for (const DfdLevel& level : model.levels) {
            for (const DataFlow& flow : level.flows) {
                CHECK(flow.crosses == compute_crosses(level, flow));
            }
        }
    }
}
