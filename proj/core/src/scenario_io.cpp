#include "mfg/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mfg/errors.hpp"

namespace mfg {

namespace {

using Scalar = std::function<double&(Scenario&)>;
using List = std::function<std::vector<double>&(Scenario&)>;

struct Registry {
    std::vector<std::pair<std::string, Scalar>> scalars;
    std::vector<std::pair<std::string, List>> lists;
};

void addKernel(Registry& r, const std::string& key, std::function<TrigKernel&(Scenario&)> k) {
    r.lists.emplace_back(key + ".cos", [k](Scenario& s) -> std::vector<double>& { return k(s).cosCoef; });
    r.lists.emplace_back(key + ".sin", [k](Scenario& s) -> std::vector<double>& { return k(s).sinCoef; });
}

const Registry& registry() {
    static const Registry r = [] {
        Registry r;
        auto sc = [&r](std::string key, Scalar f) { r.scalars.emplace_back(std::move(key), std::move(f)); };
        sc("T", [](Scenario& s) -> double& { return s.T; });
        sc("a.base", [](Scenario& s) -> double& { return s.aBase; });
        sc("a.amp", [](Scenario& s) -> double& { return s.aAmp; });
        sc("a0", [](Scenario& s) -> double& { return s.a0; });
        sc("x0", [](Scenario& s) -> double& { return s.x0; });
        sc("m0.center", [](Scenario& s) -> double& { return s.m0Center; });
        sc("m0.var", [](Scenario& s) -> double& { return s.m0Var; });
        sc("dt.factor", [](Scenario& s) -> double& { return s.dtFactor; });
        sc("dt.driftBound", [](Scenario& s) -> double& { return s.driftBound; });
        sc("fp.theta", [](Scenario& s) -> double& { return s.fp.theta; });
        sc("fp.tol", [](Scenario& s) -> double& { return s.fp.tol; });
        sc("H.scale", [](Scenario& s) -> double& { return s.H.scale; });
        sc("H.q0", [](Scenario& s) -> double& { return s.H.q0; });
        sc("H.q1", [](Scenario& s) -> double& { return s.H.q1; });
        sc("H.beta", [](Scenario& s) -> double& { return s.H.beta; });
        sc("H.B", [](Scenario& s) -> double& { return s.H.B; });
        sc("H.c0", [](Scenario& s) -> double& { return s.H.c0; });
        sc("H.e", [](Scenario& s) -> double& { return s.H.e; });
        sc("H.c2", [](Scenario& s) -> double& { return s.H.c2; });
        sc("H.A", [](Scenario& s) -> double& { return s.H.A; });
        sc("H.V", [](Scenario& s) -> double& { return s.H.V; });
        sc("H.C0", [](Scenario& s) -> double& { return s.H.C0; });
        sc("H.gamma", [](Scenario& s) -> double& { return s.H.gamma; });
        sc("H0.scale", [](Scenario& s) -> double& { return s.H0.scale; });
        sc("H0.beta0", [](Scenario& s) -> double& { return s.H0.beta0; });
        sc("H0.c00", [](Scenario& s) -> double& { return s.H0.c00; });
        sc("H0.V0", [](Scenario& s) -> double& { return s.H0.V0; });
        sc("G.Ag", [](Scenario& s) -> double& { return s.G.Ag; });
        sc("G.Bg", [](Scenario& s) -> double& { return s.G.Bg; });
        sc("G.cg", [](Scenario& s) -> double& { return s.G.cg; });
        sc("G.eg", [](Scenario& s) -> double& { return s.G.eg; });
        sc("G.qg", [](Scenario& s) -> double& { return s.G.qg; });
        sc("G0.A0", [](Scenario& s) -> double& { return s.G0.A0; });
        sc("G0.c0g", [](Scenario& s) -> double& { return s.G0.c0g; });
        sc("G0.q0g", [](Scenario& s) -> double& { return s.G0.q0g; });
        addKernel(r, "H.chi", [](Scenario& s) -> TrigKernel& { return s.H.chi; });
        addKernel(r, "H.phi", [](Scenario& s) -> TrigKernel& { return s.H.phi; });
        addKernel(r, "H.psi", [](Scenario& s) -> TrigKernel& { return s.H.psi; });
        addKernel(r, "H0.eta", [](Scenario& s) -> TrigKernel& { return s.H0.eta; });
        addKernel(r, "H0.zeta", [](Scenario& s) -> TrigKernel& { return s.H0.zeta; });
        addKernel(r, "G.kappa", [](Scenario& s) -> TrigKernel& { return s.G.kappa; });
        addKernel(r, "G.lambda", [](Scenario& s) -> TrigKernel& { return s.G.lambda; });
        addKernel(r, "G0.theta", [](Scenario& s) -> TrigKernel& { return s.G0.theta; });
        return r;
    }();
    return r;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& key, const std::string& msg) {
    std::ostringstream os;
    os << origin;
    if (line) os << ":" << line;
    if (!key.empty()) os << ": key '" << key << "'";
    os << ": " << msg;
    throw ScenarioError(os.str());
}

bool parseNumber(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Entry {
    std::string value;
    std::size_t line;
};

}  // namespace

Scenario parseScenario(const std::string& text, const std::string& origin) {
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        const auto hash = raw.find('#');
        const auto line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(origin, lineNo, "", "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) fail(origin, lineNo, "", "empty key");
        if (value.empty()) fail(origin, lineNo, key, "empty value");
        if (!entries.emplace(key, Entry{value, lineNo}).second) fail(origin, lineNo, key, "duplicate key");
    }

    auto take = [&](const std::string& key) -> const Entry* {
        auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };
    auto number = [&](const std::string& key, const Entry& e) {
        double v = 0.0;
        if (!parseNumber(e.value, v)) fail(origin, e.line, key, "expected a number, got '" + e.value + "'");
        return v;
    };
    auto count = [&](const std::string& key, const Entry& e) {
        const double v = number(key, e);
        if (v < 1.0 || v != std::floor(v)) fail(origin, e.line, key, "expected a positive integer");
        return static_cast<std::size_t>(v);
    };

    Scenario s = defaultScenario();
    if (const auto* e = take("base")) {
        if (e->value == "default") s = defaultScenario();
        else if (e->value == "decoupled") s = decoupledScenario();
        else fail(origin, e->line, "base", "unknown base scenario '" + e->value + "'");
        entries.erase("base");
    }
    if (const auto* e = take("name")) {
        s.name = e->value;
        entries.erase("name");
    }
    if (const auto* e = take("H.tag")) {
        if (e->value != "quadratic-nonlocal") {
            fail(origin, e->line, "H.tag", "unsupported Hamiltonian '" + e->value +
                                               "'; only the catalog family 'quadratic-nonlocal' is available");
        }
        s.H.tag = e->value;
        entries.erase("H.tag");
    }
    if (const auto* e = take("a0")) {
        double v = 0.0;
        if (!parseNumber(e->value, v)) {
            fail(origin, e->line, "a0",
                 "the common-noise coefficient must be a nonnegative constant; expressions in t or x "
                 "are not allowed (got '" + e->value + "')");
        }
    }
    for (const char* prefix : {"grid", "x0grid"}) {
        const std::string p = prefix;
        TorusGrid& g = p == "grid" ? s.grid : s.x0grid;
        double length = g.length();
        std::size_t cells = g.cells();
        std::size_t line = 0;
        if (const auto* e = take(p + ".length")) {
            line = e->line;
            length = number(p + ".length", *e);
            if (!(length > 0.0)) fail(origin, e->line, p + ".length", "must be positive");
            entries.erase(p + ".length");
        }
        if (const auto* e = take(p + ".cells")) {
            cells = count(p + ".cells", *e);
            line = e->line;
            entries.erase(p + ".cells");
        }
        try {
            g = TorusGrid(length, cells);
        } catch (const InvalidArgument& err) {
            fail(origin, line, p + ".cells", err.what());
        }
    }
    if (const auto* e = take("fp.maxIter")) {
        s.fp.maxIter = static_cast<int>(count("fp.maxIter", *e));
        entries.erase("fp.maxIter");
    }

    Scenario& target = s;
    for (const auto& [key, ref] : registry().scalars) {
        if (const auto* e = take(key)) {
            ref(target) = number(key, *e);
            entries.erase(key);
        }
    }
    for (const auto& [key, ref] : registry().lists) {
        const auto* e = take(key);
        if (!e) continue;
        std::vector<double> vals;
        std::istringstream items(e->value == "none" ? std::string() : e->value);
        std::string item;
        while (std::getline(items, item, ',')) {
            double v = 0.0;
            const auto t = trim(item);
            if (!parseNumber(t, v)) fail(origin, e->line, key, "expected a comma-separated list of numbers");
            vals.push_back(v);
        }
        ref(target) = std::move(vals);
        entries.erase(key);
    }
    if (!entries.empty()) {
        const auto& [key, e] = *entries.begin();
        fail(origin, e.line, key, "unknown key");
    }
    try {
        s.validate();
    } catch (const ScenarioError& err) {
        fail(origin, 0, "", err.what());
    }
    return s;
}

Scenario loadScenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ScenarioError(path + ": cannot open scenario file");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parseScenario(buf.str(), path);
}

std::string formatScenario(const Scenario& s) {
    Scenario copy = s;
    std::ostringstream os;
    os << "# mfgsplit scenario\n";
    os << "name = " << s.name << "\n";
    os << "grid.length = " << fmt(s.grid.length()) << "\n";
    os << "grid.cells = " << s.grid.cells() << "\n";
    os << "x0grid.length = " << fmt(s.x0grid.length()) << "\n";
    os << "x0grid.cells = " << s.x0grid.cells() << "\n";
    os << "fp.maxIter = " << s.fp.maxIter << "\n";
    os << "H.tag = " << s.H.tag << "\n";
    for (const auto& [key, ref] : registry().scalars) os << key << " = " << fmt(ref(copy)) << "\n";
    for (const auto& [key, ref] : registry().lists) {
        const auto& v = ref(copy);
        os << key << " = ";
        if (v.empty()) os << "none";
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << fmt(v[i]);
        os << "\n";
    }
    return os.str();
}

void saveScenario(const Scenario& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ScenarioError(path + ": cannot write scenario file");
    f << formatScenario(s);
}

bool sameScenario(const Scenario& a, const Scenario& b) { return formatScenario(a) == formatScenario(b); }

}  // namespace mfg
