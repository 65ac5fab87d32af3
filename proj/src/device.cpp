#include "ddweaver/device.hpp"

#include "ddweaver/error.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

namespace ddweaver {

bool DeviceModel::has_edge(std::size_t p, std::size_t q) const {
    if (p == q)
        return false;
    return std::binary_search(edges.begin(), edges.end(), Edge(p, q));
}

std::vector<std::size_t> DeviceModel::neighbors(std::size_t q) const {
    std::vector<std::size_t> out;
    for (const auto& e : edges) {
        if (e.a == q)
            out.push_back(e.b);
        else if (e.b == q)
            out.push_back(e.a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Nanoseconds DeviceModel::cx_duration(std::size_t p, std::size_t q) const {
    auto it = dur_cx.find(Edge(p, q));
    if (!has_edge(p, q) || it == dur_cx.end())
        throw UnroutedGateError(fmt::format("unrouted gate: Q{} and Q{} are not coupled", p, q));
    return it->second;
}

double DeviceModel::zz(std::size_t p, std::size_t q) const {
    auto it = zz_khz.find(Edge(p, q));
    return it == zz_khz.end() ? 0.0 : it->second;
}

void DeviceModel::validate() const {
    if (n_qubits == 0)
        throw InvariantError("n_qubits: must be positive");
    if (dur_1q <= 0)
        throw InvariantError("dur_1q: must be positive");
    if (dur_measure <= 0)
        throw InvariantError("dur_measure: must be positive");
    if (pulse <= 0)
        throw InvariantError("pulse: must be positive");
    if (pulse > dur_1q)
        throw InvariantError(fmt::format("pulse: {} ns exceeds dur_1q {} ns", pulse, dur_1q));
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw InvariantError("edges: must be sorted and unique");
    for (const auto& e : edges) {
        if (e.b >= n_qubits || e.a == e.b)
            throw InvariantError(fmt::format("edge: ({},{}) references an invalid qubit", e.a, e.b));
        auto it = dur_cx.find(e);
        if (it == dur_cx.end() || it->second <= 0)
            throw InvariantError(fmt::format("edge: ({},{}) needs a positive dur", e.a, e.b));
        if (zz(e.a, e.b) < 0)
            throw InvariantError(fmt::format("zz: ({},{}) must be non-negative", e.a, e.b));
    }
    if (dur_cx.size() != edges.size())
        throw InvariantError("dur_cx: entries for non-edges");
    if (t1_us.size() != n_qubits || t2_us.size() != n_qubits)
        throw InvariantError("t1/t2: one value per qubit required");
    for (std::size_t q = 0; q < n_qubits; ++q) {
        if (!(t1_us[q] > 0))
            throw InvariantError(fmt::format("t1[{}]: must be positive", q));
        if (!(t2_us[q] > 0))
            throw InvariantError(fmt::format("t2[{}]: must be positive", q));
        if (t2_us[q] > 2.0 * t1_us[q])
            throw InvariantError(fmt::format("t2[{}]: {} us violates T2 <= 2*T1 (T1 = {} us)", q, t2_us[q], t1_us[q]));
    }
    if (cr_shift_khz < 0)
        throw InvariantError("cr_shift: must be non-negative");
    if (pulse_cr_shift_khz < 0)
        throw InvariantError("pulse_cr_shift: must be non-negative");
    if (sigma_qs_khz < 0)
        throw InvariantError("sigma_qs: must be non-negative");
}

namespace {

void add_edge(DeviceModel& dev, std::size_t a, std::size_t b, Nanoseconds dur, double zz) {
    Edge e(a, b);
    if (std::find(dev.edges.begin(), dev.edges.end(), e) == dev.edges.end())
        dev.edges.push_back(e);
    dev.dur_cx[e] = dur;
    dev.zz_khz[e] = zz;
    std::sort(dev.edges.begin(), dev.edges.end());
}

} // namespace

DeviceModel preset_lagos() {
    DeviceModel dev;
    dev.name = "lagos";
    dev.n_qubits = 7;
    for (auto [a, b] : {std::pair{0, 1}, {1, 2}, {1, 3}, {3, 5}, {4, 5}, {5, 6}})
        add_edge(dev, a, b, DeviceDefaults::dur_cx, DeviceDefaults::zz_khz);
    dev.t1_us.assign(7, DeviceDefaults::t1_us);
    dev.t2_us.assign(7, DeviceDefaults::t2_us);
    dev.validate();
    return dev;
}

DeviceModel load_device(std::string_view text) {
    DeviceModel dev;
    std::map<std::size_t, double> t1, t2;
    std::size_t line_no = 0;

    auto need = [&](const std::vector<std::string_view>& tok, std::size_t n) {
        if (tok.size() != n)
            throw ParseError(line_no, fmt::format("'{}' expects {} argument(s)", tok[0], n - 1));
    };
    auto number = [&](std::string_view s) {
        auto v = detail::parse_double(s);
        if (!v || !std::isfinite(*v))
            throw ParseError(line_no, fmt::format("bad number '{}'", s));
        return *v;
    };
    auto duration = [&](std::string_view s) {
        auto v = detail::parse_signed(s);
        if (!v)
            throw ParseError(line_no, fmt::format("bad duration '{}'", s));
        return *v;
    };
    auto qubit = [&](std::string_view s) {
        auto v = detail::parse_unsigned(s);
        if (!v)
            throw ParseError(line_no, fmt::format("bad qubit '{}'", s));
        if (dev.n_qubits == 0)
            throw ParseError(line_no, "n_qubits must precede per-qubit entries");
        if (*v >= dev.n_qubits)
            throw ParseError(line_no, fmt::format("qubit {} out of range", *v));
        return *v;
    };

    for (auto raw : detail::split_lines(text)) {
        ++line_no;
        auto tok = detail::tokenize(detail::strip_comment(raw));
        if (tok.empty())
            continue;
        const auto key = tok[0];
        if (key == "name") {
            need(tok, 2);
            dev.name = std::string(tok[1]);
        } else if (key == "n_qubits") {
            need(tok, 2);
            auto n = detail::parse_unsigned(tok[1]);
            if (!n || *n == 0)
                throw ParseError(line_no, "bad n_qubits");
            dev.n_qubits = *n;
        } else if (key == "edge") {
            if (tok.size() < 3)
                throw ParseError(line_no, "'edge' expects I J [dur=ns] [zz=kHz]");
            auto a = qubit(tok[1]);
            auto b = qubit(tok[2]);
            if (a == b)
                throw ParseError(line_no, "edge endpoints must differ");
            Nanoseconds dur = DeviceDefaults::dur_cx;
            double zz = DeviceDefaults::zz_khz;
            for (std::size_t i = 3; i < tok.size(); ++i) {
                if (tok[i].starts_with("dur="))
                    dur = duration(tok[i].substr(4));
                else if (tok[i].starts_with("zz="))
                    zz = number(tok[i].substr(3));
                else
                    throw ParseError(line_no, fmt::format("unknown edge option '{}'", tok[i]));
            }
            add_edge(dev, a, b, dur, zz);
        } else if (key == "t1" || key == "t2") {
            need(tok, 3);
            auto q = qubit(tok[1]);
            (key == "t1" ? t1 : t2)[q] = number(tok[2]);
        } else if (key == "dur_1q") {
            need(tok, 2);
            dev.dur_1q = duration(tok[1]);
        } else if (key == "dur_measure") {
            need(tok, 2);
            dev.dur_measure = duration(tok[1]);
        } else if (key == "pulse") {
            need(tok, 2);
            dev.pulse = duration(tok[1]);
        } else if (key == "cr_shift") {
            need(tok, 2);
            dev.cr_shift_khz = number(tok[1]);
        } else if (key == "pulse_cr_shift") {
            need(tok, 2);
            dev.pulse_cr_shift_khz = number(tok[1]);
        } else if (key == "sigma_qs") {
            need(tok, 2);
            dev.sigma_qs_khz = number(tok[1]);
        } else {
            throw ParseError(line_no, fmt::format("unknown key '{}'", key));
        }
    }
    if (dev.n_qubits == 0)
        throw ParseError(0, "missing n_qubits");

    dev.t1_us.assign(dev.n_qubits, DeviceDefaults::t1_us);
    dev.t2_us.assign(dev.n_qubits, DeviceDefaults::t2_us);
    for (auto [q, v] : t1)
        dev.t1_us[q] = v;
    for (auto [q, v] : t2)
        dev.t2_us[q] = v;
    dev.validate();
    return dev;
}

std::string render_device(const DeviceModel& dev) {
    std::string out;
    out += fmt::format("name {}\n", dev.name);
    out += fmt::format("n_qubits {}\n", dev.n_qubits);
    for (const auto& e : dev.edges)
        out += fmt::format("edge {} {} dur={} zz={}\n", e.a, e.b, dev.dur_cx.at(e), dev.zz(e.a, e.b));
    for (std::size_t q = 0; q < dev.n_qubits; ++q)
        out += fmt::format("t1 {} {}\nt2 {} {}\n", q, dev.t1_us[q], q, dev.t2_us[q]);
    out += fmt::format("dur_1q {}\ndur_measure {}\npulse {}\n", dev.dur_1q, dev.dur_measure, dev.pulse);
    out += fmt::format("cr_shift {}\npulse_cr_shift {}\nsigma_qs {}\n", dev.cr_shift_khz, dev.pulse_cr_shift_khz,
                       dev.sigma_qs_khz);
    return out;
}

DeviceModel device_from_spec(const std::string& preset_or_path) {
    if (preset_or_path == "lagos")
        return preset_lagos();
    std::ifstream in(preset_or_path);
    if (!in)
        throw Error(fmt::format("cannot open device file '{}' (known presets: lagos)", preset_or_path));
    std::stringstream ss;
    ss << in.rdbuf();
    return load_device(ss.str());
}

std::optional<std::size_t> distance(const DeviceModel& device, std::size_t a, std::size_t b) {
    if (a >= device.n_qubits || b >= device.n_qubits)
        throw InvariantError(fmt::format("distance: qubit out of range ({}, {})", a, b));
    if (a == b)
        return 0;
    std::vector<std::optional<std::size_t>> dist(device.n_qubits);
    std::queue<std::size_t> frontier;
    dist[a] = 0;
    frontier.push(a);
    while (!frontier.empty()) {
        auto q = frontier.front();
        frontier.pop();
        for (auto n : device.neighbors(q)) {
            if (dist[n])
                continue;
            dist[n] = *dist[q] + 1;
            if (n == b)
                return dist[n];
            frontier.push(n);
        }
    }
    return std::nullopt;
}

Mapping Mapping::identity(std::size_t n) {
    Mapping m;
    for (std::size_t i = 0; i < n; ++i)
        m.physical.push_back(i);
    return m;
}

Mapping Mapping::parse(std::string_view text) {
    Mapping m;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        auto v = detail::parse_unsigned(item);
        if (!v)
            throw ParseError(0, fmt::format("bad mapping entry '{}' in '{}'", item, text));
        m.physical.push_back(*v);
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return m;
}

std::optional<std::size_t> Mapping::logical_of(std::size_t phys) const {
    auto it = std::find(physical.begin(), physical.end(), phys);
    if (it == physical.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - physical.begin());
}

void Mapping::validate(const DeviceModel& device) const {
    std::set<std::size_t> seen;
    for (auto p : physical) {
        if (p >= device.n_qubits)
            throw InvariantError(fmt::format("mapping: physical qubit {} out of range", p));
        if (!seen.insert(p).second)
            throw InvariantError(fmt::format("mapping: physical qubit {} used twice", p));
    }
}

} // namespace ddweaver
