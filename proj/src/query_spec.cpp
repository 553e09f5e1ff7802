#include <joinagg/query_spec.hpp>

#include <joinagg/errors.hpp>

#include <algorithm>
#include <cctype>


namespace joinagg {

namespace {

std::string_view trim(std::string_view s)
{
    while (not s.empty() and std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (not s.empty() and std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string upper(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

}

AttributeRef parse_attribute_ref(std::string_view text)
{
    text = trim(text);
    auto dot = text.find('.');
    if (dot == std::string_view::npos or dot == 0 or dot + 1 == text.size() or
        text.find('.', dot + 1) != std::string_view::npos)
        throw QueryError("malformed attribute reference '" + std::string(text) + "', expected alias.column");
    return {std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

std::string_view to_string(AggregateKind kind)
{
    switch (kind) {
        case AggregateKind::kCountStar: return "COUNT";
        case AggregateKind::kSum:       return "SUM";
        case AggregateKind::kMin:       return "MIN";
        case AggregateKind::kMax:       return "MAX";
        case AggregateKind::kAvg:       return "AVG";
    }
    return "?";
}

std::string Aggregate::to_string() const
{
    if (kind == AggregateKind::kCountStar)
        return "COUNT(*)";
    return std::string(joinagg::to_string(kind)) + "(" + attribute->to_string() + ")";
}

Aggregate parse_aggregate(std::string_view text)
{
    text = trim(text);
    auto open = text.find('(');
    if (open == std::string_view::npos or text.back() != ')')
        throw QueryError("malformed aggregate '" + std::string(text) + "'");
    auto fn = upper(trim(text.substr(0, open)));
    auto arg = trim(text.substr(open + 1, text.size() - open - 2));
    if (fn == "COUNT") {
        if (arg != "*")
            throw QueryError("only COUNT(*) is supported");
        return {AggregateKind::kCountStar, std::nullopt};
    }
    AggregateKind kind;
    if (fn == "SUM") kind = AggregateKind::kSum;
    else if (fn == "MIN") kind = AggregateKind::kMin;
    else if (fn == "MAX") kind = AggregateKind::kMax;
    else if (fn == "AVG") kind = AggregateKind::kAvg;
    else throw QueryError("unsupported aggregate function '" + fn + "'");
    return {kind, parse_attribute_ref(arg)};
}

const RelationRef * QuerySpec::find_relation(std::string_view alias) const
{
    for (const auto &r : relations) {
        if (r.alias == alias)
            return &r;
    }
    return nullptr;
}

std::string to_sql(const QuerySpec &q)
{
    std::string sql = "SELECT ";
    for (const auto &g : q.group_by)
        sql += g.to_string() + ", ";
    sql += q.aggregate.to_string();
    sql += " FROM ";
    for (std::size_t i = 0; i != q.relations.size(); ++i) {
        if (i) sql += ", ";
        sql += q.relations[i].source;
        if (q.relations[i].alias != q.relations[i].source)
            sql += " " + q.relations[i].alias;
    }
    if (not q.joins.empty()) {
        sql += " WHERE ";
        for (std::size_t i = 0; i != q.joins.size(); ++i) {
            if (i) sql += " AND ";
            sql += q.joins[i].left.to_string() + " = " + q.joins[i].right.to_string();
        }
    }
    sql += " GROUP BY ";
    for (std::size_t i = 0; i != q.group_by.size(); ++i) {
        if (i) sql += ", ";
        sql += q.group_by[i].to_string();
    }
    return sql;
}

nlohmann::json to_json(const QuerySpec &q)
{
    nlohmann::json doc;
    doc["relations"] = nlohmann::json::array();
    for (const auto &r : q.relations)
        doc["relations"].push_back({{"source", r.source}, {"alias", r.alias}});
    doc["joins"] = nlohmann::json::array();
    for (const auto &j : q.joins)
        doc["joins"].push_back({{"left", j.left.to_string()}, {"right", j.right.to_string()}});
    doc["group_by"] = nlohmann::json::array();
    for (const auto &g : q.group_by)
        doc["group_by"].push_back(g.to_string());
    doc["aggregate"] = q.aggregate.to_string();
    return doc;
}

QuerySpec query_from_json(const nlohmann::json &doc)
{
    try {
        QuerySpec q;
        for (const auto &r : doc.at("relations")) {
            if (r.is_string()) {
                q.relations.push_back({r.get<std::string>(), r.get<std::string>()});
            } else {
                auto source = r.at("source").get<std::string>();
                auto alias = r.contains("alias") ? r.at("alias").get<std::string>() : source;
                q.relations.push_back({std::move(source), std::move(alias)});
            }
        }
        if (doc.contains("joins")) {
            for (const auto &j : doc.at("joins"))
                q.joins.push_back({parse_attribute_ref(j.at("left").get<std::string>()),
                                   parse_attribute_ref(j.at("right").get<std::string>())});
        }
        for (const auto &g : doc.at("group_by"))
            q.group_by.push_back(parse_attribute_ref(g.get<std::string>()));
        q.aggregate = parse_aggregate(doc.at("aggregate").get<std::string>());
        return q;
    } catch (const nlohmann::json::exception &e) {
        throw QueryError(std::string("malformed query document: ") + e.what());
    }
}

}
