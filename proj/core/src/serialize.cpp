#include "mmlab/serialize.hpp"

#include "mmlab/error.hpp"

namespace mmlab {

using nlohmann::json;

json to_json(const ExtendedReal& x) {
    if (x.is_finite()) return x.value();
    return x.to_string();
}

ExtendedReal extended_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return ExtendedReal::parse(j.get<std::string>());
    fail(ErrorKind::Parse, "expected a number or \"+inf\"/\"-inf\"", j.dump());
}

json point_json(std::span<const double> p) { return json(std::vector<double>(p.begin(), p.end())); }

json to_json(const GridSpec& g) {
    if (g.kind() == GridSpec::Kind::Explicit) {
        json pts = json::array();
        for (const Point& p : g.explicit_list()) pts.push_back(point_json(p));
        return {{"kind", "explicit"}, {"points", pts}};
    }
    return {{"kind", "uniform"}, {"lo", g.lo()}, {"hi", g.hi()}, {"n", g.counts()}};
}

GridSpec grid_from_json(const json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "explicit") return GridSpec::explicit_points(j.at("points").get<std::vector<Point>>());
        if (kind == "uniform") {
            return GridSpec::uniform(j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>(),
                                     j.at("n").get<std::vector<std::size_t>>());
        }
        fail(ErrorKind::Parse, "grid: unknown kind '" + kind + "'");
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("grid: ") + e.what());
    }
}

json to_json(const ScalarField& f) {
    return {{"domain", to_json(f.domain())},
            {"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

ScalarField field_from_json(const json& j) {
    try {
        return ScalarField::from_values(grid_from_json(j.at("domain")), j.at("values").get<std::vector<double>>());
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("field: ") + e.what());
    }
}

json to_json(const MinimaCluster& m) {
    json pts = json::array();
    for (const Point& p : m.points) pts.push_back(point_json(p));
    return {{"points", pts},
            {"indices", m.indices},
            {"point_values", m.point_values},
            {"value", m.value},
            {"tol_val", m.tol_val},
            {"tol_sep", m.tol_sep}};
}

}  // namespace mmlab
