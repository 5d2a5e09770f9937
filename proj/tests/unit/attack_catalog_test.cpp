#include "tmforge/attack_catalog.hpp"

#include "doctest.h"

using namespace tmforge;

TEST_CASE("attack-library ids parse to their source and sequence") {
    auto v1 = parse_attack_lib_id("AL-V-1");
    REQUIRE(v1.ok());
    CHECK(v1.value().source == AttackSourceKind::Cve);
    CHECK(v1.value().seq == 1);

    auto a458 = parse_attack_lib_id("AL-A-458");
    REQUIRE(a458.ok());
    CHECK(a458.value().source == AttackSourceKind::AttackTechnique);
    CHECK(a458.value().seq == 458);
}

TEST_CASE("unknown source letters and bad shapes are rejected with the failing segment") {
    auto bad_letter = parse_attack_lib_id("AL-X-1");
    REQUIRE(!bad_letter.ok());
    CHECK(bad_letter.error().find("unknown source letter X") != std::string::npos);

    CHECK(!parse_attack_lib_id("AL-V-0").ok());
    CHECK(!parse_attack_lib_id("AL-V-").ok());
    CHECK(!parse_attack_lib_id("AL-V-01").ok());
    CHECK(!parse_attack_lib_id("AL-VV-3").ok());
    CHECK(!parse_attack_lib_id("ALV-3").ok());
    CHECK(!parse_attack_lib_id("").ok());
}

TEST_CASE("format and parse are mutually inverse") {
    const AttackSourceKind kinds[] = {
        AttackSourceKind::Cve,        AttackSourceKind::Cwe,
        AttackSourceKind::Paper,      AttackSourceKind::Conference,
        AttackSourceKind::AttackTechnique, AttackSourceKind::Standard,
        AttackSourceKind::Report,
    };
    for (AttackSourceKind kind : kinds) {
        for (int seq : {1, 2, 17, 458, 9999}) {
            const AttackLibId id{kind, seq};
            auto parsed = parse_attack_lib_id(id.text());
            REQUIRE(parsed.ok());
            CHECK(parsed.value() == id);
        }
    }
    for (const char* text : {"AL-V-1", "AL-P-2", "AL-A-458", "AL-W-3", "AL-C-1"}) {
        auto parsed = parse_attack_lib_id(text);
        REQUIRE(parsed.ok());
        CHECK(parsed.value().text() == text);
    }
}

TEST_CASE("catalog loads entries and counts sources") {
    const std::string doc = R"({
      "entries": [
        {"id": "AL-C-1", "title": "cloud talk"},
        {"id": "AL-V-1", "title": "cloud study", "external_ref": "x"},
        {"id": "AL-A-458", "title": "shutdown technique"}
      ]})";
    auto loaded = load_attack_catalog(doc);
    REQUIRE(loaded.ok());
    CHECK(loaded.value->size() == 3);
    auto counts = loaded.value->source_counts();
    CHECK(counts[AttackSourceKind::Conference] == 1);
    CHECK(counts[AttackSourceKind::Cve] == 1);
    CHECK(counts[AttackSourceKind::AttackTechnique] == 1);
    CHECK(loaded.value->find("AL-V-1") != nullptr);
    CHECK(loaded.value->find("AL-V-2") == nullptr);
}

TEST_CASE("duplicate ids are schema errors") {
    const std::string doc = R"({
      "entries": [
        {"id": "AL-V-1", "title": "one"},
        {"id": "AL-V-1", "title": "two"}
      ]})";
    auto loaded = load_attack_catalog(doc);
    REQUIRE(!loaded.ok());
    REQUIRE(loaded.errors.size() == 1);
    CHECK(loaded.errors[0].message.find("duplicate id") != std::string::npos);
}

TEST_CASE("an empty entry list is an empty catalog") {
    auto loaded = load_attack_catalog(R"({"entries": []})");
    REQUIRE(loaded.ok());
    CHECK(loaded.value->size() == 0);
}

TEST_CASE("malformed entries are reported with their index") {
    auto loaded = load_attack_catalog(R"({"entries": [{"id": "AL-V-1"}]})");
    REQUIRE(!loaded.ok());
    CHECK(loaded.errors[0].path == "entries[0]");
}
