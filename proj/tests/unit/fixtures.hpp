#pragma once

#include "../support/random_queries.hpp"

#include <joinagg/relation.hpp>

#include <filesystem>
#include <memory>
#include <string>

namespace joinagg::testing {

inline RelationPtr share(Relation r) { return std::make_shared<const Relation>(std::move(r)); }

/// Three relations: R1(g,j) feeding two group relations through j1.
inline RelationMap worked_example_relations()
{
    RelationMap rels;
    rels["R1"] = share(make_relation("R1", {"g", "j"}, {{"1a", "j1"}, {"1b", "j1"}, {"1b", "j1"}}));
    rels["R2"] = share(make_relation("R2", {"j", "g"}, {{"j1", "2a"}}));
    rels["R3"] = share(make_relation("R3", {"j", "g"}, {{"j1", "3b"}}));
    return rels;
}

inline constexpr const char *kWorkedExampleSql =
    "SELECT R1.g, R2.g, R3.g, COUNT(*) FROM R1, R2, R3 WHERE R1.j = R2.j AND R1.j = R3.j GROUP BY R1.g, R2.g, R3.g";

/// The six-relation running example: A -> B -> {C, D}, D -> {E, F}.
inline constexpr const char *kRunningExampleSql =
    "SELECT A.g1, C.g2, E.g3, F.g4, COUNT(*) FROM A, B, C, D, E, F "
    "WHERE A.j = B.j AND B.jc = C.jc AND B.jd = D.jd AND D.je = E.je AND D.je = F.je "
    "GROUP BY A.g1, C.g2, E.g3, F.g4";

inline RelationMap running_example_relations()
{
    RelationMap rels;
    rels["A"] = share(make_relation("A", {"g1", "j"}, {{"1a", "j1"}, {"1b", "j1"}, {"1b", "j2"}}));
    rels["B"] = share(make_relation("B", {"j", "jc", "jd"}, {{"j1", "jc1", "jd1"}, {"j1", "jc1", "jd1"}, {"j2", "jc2", "jd1"}}));
    rels["C"] = share(make_relation("C", {"g2", "jc"}, {{"2a", "jc1"}, {"2a", "jc1"}, {"2b", "jc2"}}));
    rels["D"] = share(make_relation("D", {"jd", "je"}, {{"jd1", "je1"}, {"jd1", "je2"}}));
    rels["E"] = share(make_relation("E", {"je", "g3"}, {{"je1", "3a"}, {"je1", "3b"}, {"je2", "3b"}}));
    rels["F"] = share(make_relation("F", {"je", "g4"}, {{"je1", "4a"}, {"je2", "4b"}, {"je2", "4b"}}));
    return rels;
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir
{
    std::filesystem::path path;

    explicit TempDir(const std::string &name) : path(std::filesystem::temp_directory_path() / ("joinagg_" + name))
    {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}
