#include "fpprop/problem.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

namespace fpprop {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

[[noreturn]] void fail(const YAML::Node& at, const std::string& msg) {
    throw spec_parse_error(msg, at.IsDefined() ? line_of(at) : -1);
}

YAML::Node require(const YAML::Node& parent, const std::string& key) {
    YAML::Node child = parent[key];
    if (!child.IsDefined()) fail(parent, "missing required key '" + key + "'");
    return child;
}

double as_double(const YAML::Node& n, const std::string& what) {
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        fail(n, what + ": expected a number");
    }
}

int as_int(const YAML::Node& n, const std::string& what) {
    try {
        return n.as<int>();
    } catch (const YAML::Exception&) {
        fail(n, what + ": expected an integer");
    }
}

std::vector<double> as_double_list(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence()) fail(n, what + ": expected a list of numbers");
    std::vector<double> out;
    out.reserve(n.size());
    for (const auto& e : n) out.push_back(as_double(e, what));
    return out;
}

ScalarSchedule parse_schedule(const YAML::Node& n) {
    if (!n.IsMap()) fail(n, "schedule: expected a map with a 'kind' key");
    const std::string kind = require(n, "kind").as<std::string>();
    if (kind == "constant") return ScalarSchedule::constant(as_double(require(n, "value"), "constant schedule"));
    if (kind == "poly")
        return ScalarSchedule::polynomial(as_double_list(require(n, "coeffs"), "poly schedule"));
    if (kind == "table") {
        const YAML::Node knots = require(n, "knots");
        if (!knots.IsSequence()) fail(knots, "table schedule: 'knots' must be a list of [t, value] pairs");
        std::vector<double> ts, vs;
        for (const auto& pair : knots) {
            if (!pair.IsSequence() || pair.size() != 2)
                fail(pair, "table schedule: each knot must be a [t, value] pair");
            ts.push_back(as_double(pair[0], "table knot time"));
            vs.push_back(as_double(pair[1], "table knot value"));
        }
        try {
            return ScalarSchedule::table(std::move(ts), std::move(vs));
        } catch (const std::invalid_argument& e) {
            fail(knots, e.what());
        }
    }
    fail(n, "schedule: unknown kind '" + kind + "' (expected constant|poly|table)");
}

VectorSchedule parse_vector_schedule(const YAML::Node& n, int dim, const std::string& what) {
    if (!n.IsSequence() || static_cast<int>(n.size()) != dim)
        fail(n, what + ": expected a list of " + std::to_string(dim) + " schedules");
    std::vector<ScalarSchedule> comps;
    for (const auto& e : n) comps.push_back(parse_schedule(e));
    return VectorSchedule(std::move(comps));
}

TensorSchedule parse_tensor_schedule(const YAML::Node& n, int dim, const std::string& what) {
    const int expect = dim * (dim + 1) / 2;
    if (!n.IsSequence() || static_cast<int>(n.size()) != expect)
        fail(n, what + ": expected the " + std::to_string(expect) +
                    " upper-triangle schedules (row-major)");
    std::vector<ScalarSchedule> upper;
    for (const auto& e : n) upper.push_back(parse_schedule(e));
    return TensorSchedule(dim, std::move(upper));
}

Eigen::VectorXd parse_vector(const YAML::Node& n, int dim, const std::string& what) {
    const std::vector<double> v = as_double_list(n, what);
    if (static_cast<int>(v.size()) != dim)
        fail(n, what + ": expected " + std::to_string(dim) + " entries");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
}

Eigen::MatrixXd parse_symmetric(const YAML::Node& n, int dim, const std::string& what) {
    const std::vector<double> v = as_double_list(n, what);
    if (static_cast<int>(v.size()) != dim * (dim + 1) / 2)
        fail(n, what + ": expected the upper triangle, " +
                    std::to_string(dim * (dim + 1) / 2) + " entries (row-major)");
    Eigen::MatrixXd m(dim, dim);
    int k = 0;
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) m(i, j) = m(j, i) = v[k++];
    return m;
}

RegularGrid parse_grid(const YAML::Node& n, int dim) {
    const std::vector<double> lo = as_double_list(require(n, "min"), "grid min");
    const std::vector<double> hi = as_double_list(require(n, "max"), "grid max");
    const YAML::Node counts = require(n, "count");
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim ||
        !counts.IsSequence() || static_cast<int>(counts.size()) != dim)
        fail(n, "grid: min/max/count must each have dim entries");
    std::vector<RegularGrid::Axis> axes;
    for (int i = 0; i < dim; ++i)
        axes.push_back({lo[i], hi[i], as_int(counts[i], "grid count")});
    try {
        return RegularGrid(std::move(axes));
    } catch (const std::invalid_argument& e) {
        fail(n, e.what());
    }
}

InitialData parse_initial(const YAML::Node& n, int dim) {
    const std::string kind = require(n, "kind").as<std::string>();
    if (kind == "delta") return DiracDelta{parse_vector(require(n, "center"), dim, "delta center")};
    if (kind == "gaussian_mixture") {
        const YAML::Node comps = require(n, "components");
        if (!comps.IsSequence() || comps.size() == 0)
            fail(comps, "gaussian_mixture: need a non-empty component list");
        GaussianMixture mix;
        for (const auto& cn : comps) {
            GaussianState g;
            if (cn["log_weight"])
                g.log_weight = as_double(cn["log_weight"], "component log_weight");
            else if (cn["weight"]) {
                const double w = as_double(cn["weight"], "component weight");
                if (!(w > 0.0)) fail(cn, "component weight must be positive (or use log_weight)");
                g.log_weight = std::log(w);
            }
            g.mean = parse_vector(require(cn, "mean"), dim, "component mean");
            g.cov = parse_symmetric(require(cn, "cov"), dim, "component cov");
            mix.components.push_back(std::move(g));
        }
        return mix;
    }
    if (kind == "grid") {
        RegularGrid grid = parse_grid(require(n, "grid"), dim);
        std::vector<double> values = as_double_list(require(n, "values"), "grid values");
        if (static_cast<long>(values.size()) != grid.size())
            fail(n, "grid initial data: expected " + std::to_string(grid.size()) + " values");
        for (double v : values)
            if (!std::isfinite(v)) fail(n, "grid initial data: values must be finite");
        GridSampled gs{std::move(grid), std::move(values), GridSampled::Outside::Zero};
        if (n["outside"]) {
            const std::string o = n["outside"].as<std::string>();
            if (o == "zero")
                gs.outside = GridSampled::Outside::Zero;
            else if (o == "error")
                gs.outside = GridSampled::Outside::Error;
            else
                fail(n["outside"], "outside: expected zero|error");
        }
        return gs;
    }
    fail(n, "initial: unknown kind '" + kind + "' (expected delta|gaussian_mixture|grid)");
}

void emit_schedule(YAML::Emitter& e, const ScalarSchedule& s) {
    e << YAML::Flow << YAML::BeginMap << YAML::Key << "kind";
    switch (s.kind()) {
        case ScalarSchedule::Kind::Constant:
            e << YAML::Value << "constant" << YAML::Key << "value" << YAML::Value
              << s.coeffs()[0];
            break;
        case ScalarSchedule::Kind::Polynomial:
            e << YAML::Value << "poly" << YAML::Key << "coeffs" << YAML::Value << YAML::BeginSeq;
            for (double c : s.coeffs()) e << c;
            e << YAML::EndSeq;
            break;
        case ScalarSchedule::Kind::Table:
            e << YAML::Value << "table" << YAML::Key << "knots" << YAML::Value << YAML::BeginSeq;
            for (std::size_t i = 0; i < s.knots().size(); ++i)
                e << YAML::Flow << YAML::BeginSeq << s.knots()[i] << s.values()[i] << YAML::EndSeq;
            e << YAML::EndSeq;
            break;
    }
    e << YAML::EndMap;
}

void emit_schedule_list(YAML::Emitter& e, const std::vector<const ScalarSchedule*>& list) {
    e << YAML::BeginSeq;
    for (const auto* s : list) emit_schedule(e, *s);
    e << YAML::EndSeq;
}

}  // namespace

std::vector<Eigen::VectorXd> OutputSpec::evaluation_points() const {
    if (grid) {
        std::vector<Eigen::VectorXd> pts;
        pts.reserve(grid->size());
        for (long f = 0; f < grid->size(); ++f) pts.push_back(grid->node(f));
        return pts;
    }
    return points;
}

CoefficientSet ProblemSpec::coefficient_set() const {
    if (paper) return *paper;
    if (fpe) return from_fpe(*fpe);
    throw std::invalid_argument("ProblemSpec: no coefficient block");
}

void ProblemSpec::validate() const {
    if (dim < 1) throw std::invalid_argument("ProblemSpec: dim must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("ProblemSpec: horizon must be positive");
    if (paper.has_value() == fpe.has_value())
        throw std::invalid_argument("ProblemSpec: exactly one coefficient form must be present");
    if (paper)
        paper->validate(horizon);
    else
        fpe->validate(horizon);
    if (dim_of(initial) != dim)
        throw std::invalid_argument("ProblemSpec: initial data dimension mismatch");
    if (paper && paper->dim != dim)
        throw std::invalid_argument("ProblemSpec: coefficient dimension mismatch");
    if (fpe && fpe->dim != dim)
        throw std::invalid_argument("ProblemSpec: coefficient dimension mismatch");
    for (double t : output.times)
        if (t < 0.0 || t > horizon)
            throw std::invalid_argument("ProblemSpec: output time outside [0, horizon]");
    if (output.grid && output.grid->dim() != dim)
        throw std::invalid_argument("ProblemSpec: output grid dimension mismatch");
    for (const auto& p : output.points)
        if (p.size() != dim)
            throw std::invalid_argument("ProblemSpec: output point dimension mismatch");
}

ProblemSpec parse_problem_string(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw spec_parse_error(e.msg, e.mark.line + 1);
    }
    if (!root.IsMap()) throw spec_parse_error("problem spec: expected a map at top level", 1);

    ProblemSpec spec;
    spec.spec_version = as_int(require(root, "spec_version"), "spec_version");
    if (spec.spec_version != 1)
        fail(root["spec_version"], "unsupported spec_version (this build reads version 1)");
    spec.dim = as_int(require(root, "dim"), "dim");
    if (spec.dim < 1) fail(root["dim"], "dim must be >= 1");
    spec.horizon = as_double(require(root, "horizon"), "horizon");

    const YAML::Node coeff = require(root, "coefficients");
    const std::string form = require(coeff, "form").as<std::string>();
    if (form == "paper") {
        CoefficientSet c{spec.dim, parse_schedule(require(coeff, "a1")),
                         parse_vector_schedule(require(coeff, "a2"), spec.dim, "a2"),
                         parse_schedule(require(coeff, "a3")),
                         parse_tensor_schedule(require(coeff, "a4"), spec.dim, "a4")};
        spec.paper = std::move(c);
    } else if (form == "fpe") {
        FpeCoefficients f{spec.dim, parse_vector_schedule(require(coeff, "b1"), spec.dim, "b1"),
                          parse_schedule(require(coeff, "b2")),
                          parse_tensor_schedule(require(coeff, "D"), spec.dim, "D")};
        spec.fpe = std::move(f);
    } else {
        fail(coeff, "coefficients: unknown form '" + form + "' (expected paper|fpe)");
    }

    spec.initial = parse_initial(require(root, "initial"), spec.dim);

    const YAML::Node out = require(root, "output");
    const YAML::Node times = require(out, "times");
    if (!times.IsSequence()) fail(times, "output times: expected a list of numbers");
    spec.output.times.clear();
    for (const auto& t : times) spec.output.times.push_back(as_double(t, "output time"));
    if (out["grid"] && out["points"]) fail(out, "output: give either a grid or a point list");
    if (out["grid"]) spec.output.grid = parse_grid(out["grid"], spec.dim);
    else if (out["points"]) {
        for (const auto& p : out["points"])
            spec.output.points.push_back(parse_vector(p, spec.dim, "output point"));
    } else {
        fail(out, "output: need a grid or a point list");
    }

    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw spec_parse_error(e.what(), -1);
    }
    return spec;
}

ProblemSpec parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spec_parse_error("cannot open spec file: " + path, -1);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_string(buf.str());
}

std::string serialize_problem(const ProblemSpec& spec) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "spec_version" << YAML::Value << spec.spec_version;
    e << YAML::Key << "dim" << YAML::Value << spec.dim;
    e << YAML::Key << "horizon" << YAML::Value << spec.horizon;

    e << YAML::Key << "coefficients" << YAML::Value << YAML::BeginMap;
    if (spec.paper) {
        const CoefficientSet& c = *spec.paper;
        e << YAML::Key << "form" << YAML::Value << "paper";
        e << YAML::Key << "a1" << YAML::Value;
        emit_schedule(e, c.a1);
        e << YAML::Key << "a2" << YAML::Value;
        std::vector<const ScalarSchedule*> a2;
        for (int i = 0; i < c.dim; ++i) a2.push_back(&c.a2.component(i));
        emit_schedule_list(e, a2);
        e << YAML::Key << "a3" << YAML::Value;
        emit_schedule(e, c.a3);
        e << YAML::Key << "a4" << YAML::Value;
        std::vector<const ScalarSchedule*> a4;
        for (int i = 0; i < c.dim; ++i)
            for (int j = i; j < c.dim; ++j) a4.push_back(&c.a4.entry(i, j));
        emit_schedule_list(e, a4);
    } else if (spec.fpe) {
        const FpeCoefficients& f = *spec.fpe;
        e << YAML::Key << "form" << YAML::Value << "fpe";
        e << YAML::Key << "b1" << YAML::Value;
        std::vector<const ScalarSchedule*> b1;
        for (int i = 0; i < f.dim; ++i) b1.push_back(&f.b1.component(i));
        emit_schedule_list(e, b1);
        e << YAML::Key << "b2" << YAML::Value;
        emit_schedule(e, f.b2);
        e << YAML::Key << "D" << YAML::Value;
        std::vector<const ScalarSchedule*> D;
        for (int i = 0; i < f.dim; ++i)
            for (int j = i; j < f.dim; ++j) D.push_back(&f.D.entry(i, j));
        emit_schedule_list(e, D);
    }
    e << YAML::EndMap;

    e << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DiracDelta>) {
                e << YAML::Key << "kind" << YAML::Value << "delta";
                e << YAML::Key << "center" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                for (int i = 0; i < v.center.size(); ++i) e << v.center[i];
                e << YAML::EndSeq;
            } else if constexpr (std::is_same_v<T, GaussianMixture>) {
                e << YAML::Key << "kind" << YAML::Value << "gaussian_mixture";
                e << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
                for (const GaussianState& g : v.components) {
                    e << YAML::BeginMap;
                    e << YAML::Key << "log_weight" << YAML::Value << g.log_weight;
                    e << YAML::Key << "mean" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                    for (int i = 0; i < g.mean.size(); ++i) e << g.mean[i];
                    e << YAML::EndSeq;
                    e << YAML::Key << "cov" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                    for (int i = 0; i < g.dim(); ++i)
                        for (int j = i; j < g.dim(); ++j) e << g.cov(i, j);
                    e << YAML::EndSeq;
                    e << YAML::EndMap;
                }
                e << YAML::EndSeq;
            } else if constexpr (std::is_same_v<T, GridSampled>) {
                e << YAML::Key << "kind" << YAML::Value << "grid";
                e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
                e << YAML::Key << "min" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                for (int i = 0; i < v.grid.dim(); ++i) e << v.grid.axis(i).lo;
                e << YAML::EndSeq;
                e << YAML::Key << "max" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                for (int i = 0; i < v.grid.dim(); ++i) e << v.grid.axis(i).hi;
                e << YAML::EndSeq;
                e << YAML::Key << "count" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                for (int i = 0; i < v.grid.dim(); ++i) e << v.grid.axis(i).count;
                e << YAML::EndSeq << YAML::EndMap;
                e << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                for (double val : v.values) e << val;
                e << YAML::EndSeq;
                e << YAML::Key << "outside" << YAML::Value
                  << (v.outside == GridSampled::Outside::Zero ? "zero" : "error");
            } else {
                throw std::invalid_argument(
                    "serialize_problem: host-function initial data is not file-representable");
            }
        },
        spec.initial);
    e << YAML::EndMap;

    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "times" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double t : spec.output.times) e << t;
    e << YAML::EndSeq;
    if (spec.output.grid) {
        e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "min" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (int i = 0; i < spec.output.grid->dim(); ++i) e << spec.output.grid->axis(i).lo;
        e << YAML::EndSeq;
        e << YAML::Key << "max" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (int i = 0; i < spec.output.grid->dim(); ++i) e << spec.output.grid->axis(i).hi;
        e << YAML::EndSeq;
        e << YAML::Key << "count" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (int i = 0; i < spec.output.grid->dim(); ++i) e << spec.output.grid->axis(i).count;
        e << YAML::EndSeq << YAML::EndMap;
    } else {
        e << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
        for (const auto& p : spec.output.points) {
            e << YAML::Flow << YAML::BeginSeq;
            for (int i = 0; i < p.size(); ++i) e << p[i];
            e << YAML::EndSeq;
        }
        e << YAML::EndSeq;
    }
    e << YAML::EndMap;

    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

}  // namespace fpprop
