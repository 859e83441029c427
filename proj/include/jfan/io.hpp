// io.hpp: stream persistence (binary payload with a JSON header), manifold
// and custom-ring config parsing, and JSON/CSV report emission.
#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aml.hpp"
#include "evaluator.hpp"
#include "ring.hpp"
#include "spectra.hpp"
#include "streams.hpp"

namespace jfan {

// ----------------------------------------------------------------------
// builtin ring resolution from the names the constructors assign

inline RingPtr ring_by_name(const std::string& name) {
    if (name == "X3") return x3_classical_ring();
    if (name == "X3q") return x3_quantum_ring();
    const size_t deg = name.rfind("_deg");
    if (deg != std::string::npos) {
        const int d = std::stoi(name.substr(deg + 4));
        return restrict_hypersurface(ring_by_name(name.substr(0, deg)), d);
    }
    const size_t cross = name.rfind('x');
    if (cross != std::string::npos && cross > 0 && cross + 1 < name.size())
        return product_ring(ring_by_name(name.substr(0, cross)),
                            ring_by_name(name.substr(cross + 1)));
    if (name.size() >= 2 && name[0] == 'P') return projective_ring(std::stoi(name.substr(1)));
    throw std::invalid_argument("ring_by_name: unknown ring '" + name + "'");
}

// ----------------------------------------------------------------------
// stream cache: magic, version, JSON header, binary little-endian payload

namespace detail {

constexpr char CACHE_MAGIC[9] = "JFANCAC1";
constexpr std::uint32_t CACHE_VERSION = 1;

inline void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_i64(std::string& buf, std::int64_t v) {
    const std::uint64_t u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& buf, double v) {
    static_assert(sizeof(double) == 8);
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

struct CacheReader {
    const std::string& buf;
    size_t pos = 0;

    void need(size_t k) const {
        if (pos + k > buf.size()) throw std::runtime_error("stream cache truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::int64_t i64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 8;
        return static_cast<std::int64_t>(v);
    }
    double f64() {
        const std::uint64_t u = static_cast<std::uint64_t>(i64());
        double v;
        std::memcpy(&v, &u, 8);
        return v;
    }
};

}  // namespace detail

inline std::string serialize_stream(const CoeffStream& s) {
    nlohmann::json hdr;
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(s.ring->hash()));
    hdr["ring"] = s.ring->name;
    hdr["ring_hash"] = std::string(hex);
    hdr["n"] = s.ring->n();
    hdr["r"] = s.r;
    hdr["count"] = static_cast<int>(s.coeffs.size());
    hdr["provenance"] = s.provenance;
    const std::string h = hdr.dump();

    std::string buf(detail::CACHE_MAGIC, 8);
    detail::put_u32(buf, detail::CACHE_VERSION);
    detail::put_u32(buf, static_cast<std::uint32_t>(h.size()));
    buf += h;
    const int n = s.ring->n();
    for (int i = 0; i < n; ++i) {
        detail::put_f64(buf, s.beta.c[i].real());
        detail::put_f64(buf, s.beta.c[i].imag());
    }
    for (const ScaledClass& c : s.coeffs) {
        detail::put_i64(buf, c.exp2);
        for (int i = 0; i < n; ++i) {
            detail::put_f64(buf, c.mantissa.c[i].real());
            detail::put_f64(buf, c.mantissa.c[i].imag());
        }
    }
    return buf;
}

inline CoeffStream deserialize_stream(const std::string& buf, RingPtr ring = nullptr) {
    detail::CacheReader rd{buf};
    rd.need(8);
    if (std::memcmp(buf.data(), detail::CACHE_MAGIC, 8) != 0)
        throw std::runtime_error("stream cache: bad magic");
    rd.pos = 8;
    if (rd.u32() != detail::CACHE_VERSION)
        throw std::runtime_error("stream cache: unsupported version");
    const std::uint32_t hlen = rd.u32();
    rd.need(hlen);
    const nlohmann::json hdr = nlohmann::json::parse(buf.substr(rd.pos, hlen));
    rd.pos += hlen;

    if (!ring) ring = ring_by_name(hdr.at("ring").get<std::string>());
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(ring->hash()));
    if (hdr.at("ring_hash").get<std::string>() != hex)
        throw std::runtime_error("stream cache: ring hash mismatch");
    const int n = hdr.at("n").get<int>();
    if (n != ring->n()) throw std::runtime_error("stream cache: dimension mismatch");

    CoeffStream s;
    s.ring = ring;
    s.r = hdr.at("r").get<int>();
    s.provenance = hdr.at("provenance").get<std::string>();
    s.beta = ClassValue(ring);
    for (int i = 0; i < n; ++i) {
        const double re = rd.f64(), im = rd.f64();
        s.beta.c[i] = cplx(re, im);
    }
    const int count = hdr.at("count").get<int>();
    s.coeffs.reserve(count);
    for (int m = 0; m < count; ++m) {
        const std::int64_t e = rd.i64();
        ClassValue v(ring);
        for (int i = 0; i < n; ++i) {
            const double re = rd.f64(), im = rd.f64();
            v.c[i] = cplx(re, im);
        }
        ScaledClass sc;
        sc.mantissa = std::move(v);
        sc.exp2 = e;
        s.coeffs.push_back(std::move(sc));
    }
    return s;
}

inline void save_stream(const std::string& path, const CoeffStream& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_stream: cannot open " + path);
    const std::string buf = serialize_stream(s);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw std::runtime_error("save_stream: write failed for " + path);
}

inline CoeffStream load_stream(const std::string& path, RingPtr ring = nullptr) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_stream: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return deserialize_stream(ss.str(), std::move(ring));
}

// ----------------------------------------------------------------------
// config parsing: line-oriented sections of key = value pairs; the [table]
// section of a ring file holds sparse triples (i, j, k, re, im)

struct ConfigFile {
    // section -> ordered (key, value) pairs; bare lines get key ""
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;

    const std::vector<std::pair<std::string, std::string>>* find(const std::string& name) const {
        for (const auto& s : sections)
            if (s.first == name) return &s.second;
        return nullptr;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace detail

inline ConfigFile parse_config(const std::string& text) {
    ConfigFile cfg;
    cfg.sections.emplace_back("", std::vector<std::pair<std::string, std::string>>{});
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            cfg.sections.emplace_back(detail::trim(line.substr(1, line.size() - 2)),
                                      std::vector<std::pair<std::string, std::string>>{});
            continue;
        }
        const size_t eq = line.find('=');
        auto& sec = cfg.sections.back().second;
        if (eq == std::string::npos)
            sec.emplace_back("", line);
        else
            sec.emplace_back(detail::trim(line.substr(0, eq)),
                             detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

struct ManifoldSpec {
    std::string name;
    std::string kind;  // projective | product | hypersurface | X3 | custom
    int N = 0;
    int d = 0;
    int M = 1;
    std::vector<std::string> factors;  // product factor ring names
    std::string ambient;               // hypersurface ambient ring name
    std::string ring_file;             // custom ring config path
};

inline ManifoldSpec parse_manifold_spec(const std::string& text) {
    const ConfigFile cfg = parse_config(text);
    const auto* sec = cfg.find("manifold");
    if (!sec) throw std::invalid_argument("manifold config: missing [manifold] section");
    ManifoldSpec spec;
    for (const auto& [k, v] : *sec) {
        if (k == "name") spec.name = v;
        else if (k == "kind") spec.kind = v;
        else if (k == "N") spec.N = std::stoi(v);
        else if (k == "d") spec.d = std::stoi(v);
        else if (k == "M") spec.M = std::stoi(v);
        else if (k == "factors") spec.factors = detail::split(v, ',');
        else if (k == "ambient") spec.ambient = v;
        else if (k == "ring_file") spec.ring_file = v;
        else throw std::invalid_argument("manifold config: unknown key '" + k + "'");
    }
    if (spec.M < 1) throw std::invalid_argument("manifold config: M >= 1 required");
    if (spec.kind == "projective") {
        if (spec.N < 1) throw std::invalid_argument("manifold config: projective needs N >= 1");
    } else if (spec.kind == "product") {
        if (spec.factors.size() != 2)
            throw std::invalid_argument("manifold config: product needs two factors");
    } else if (spec.kind == "hypersurface") {
        if (spec.ambient.empty() || spec.d < 1)
            throw std::invalid_argument("manifold config: hypersurface needs ambient and d");
    } else if (spec.kind != "X3" && spec.kind != "custom") {
        throw std::invalid_argument("manifold config: unknown kind '" + spec.kind + "'");
    }
    return spec;
}

// Custom ring from a config with [ring] metadata and [table] sparse triples.
inline RingPtr parse_ring_config(const std::string& text) {
    const ConfigFile cfg = parse_config(text);
    const auto* rs = cfg.find("ring");
    if (!rs) throw std::invalid_argument("ring config: missing [ring] section");
    auto r = std::make_shared<RingPresentation>();
    std::vector<std::string> c1_parts, integrate_parts;
    for (const auto& [k, v] : *rs) {
        if (k == "name") r->name = v;
        else if (k == "dim_c") r->dim_c = std::stoi(v);
        else if (k == "fano_index") r->fano_index = std::stoi(v);
        else if (k == "basis") {
            for (const auto& b : detail::split(v, ',')) r->basis.push_back(b);
        } else if (k == "degrees") {
            for (const auto& d : detail::split(v, ',')) r->degree.push_back(std::stoi(d));
        } else if (k == "c1") c1_parts = detail::split(v, ',');
        else if (k == "integrate") integrate_parts = detail::split(v, ',');
        else throw std::invalid_argument("ring config: unknown key '" + k + "'");
    }
    const int n = static_cast<int>(r->basis.size());
    if (n == 0 || r->degree.size() != r->basis.size())
        throw std::invalid_argument("ring config: basis/degrees mismatch");
    r->c1.assign(n, cplx(0));
    for (int i = 0; i < n && i < static_cast<int>(c1_parts.size()); ++i) {
        std::istringstream ss(c1_parts[i]);
        double re = 0, im = 0;
        ss >> re >> im;
        r->c1[i] = cplx(re, im);
    }
    r->integrate_w.assign(n, 0.0);
    for (int i = 0; i < n && i < static_cast<int>(integrate_parts.size()); ++i)
        r->integrate_w[i] = std::stod(integrate_parts[i]);
    const auto* ts = cfg.find("table");
    if (!ts) throw std::invalid_argument("ring config: missing [table] section");
    for (const auto& [k, v] : *ts) {
        const std::string row = k.empty() ? v : k + "=" + v;
        std::istringstream ss(row);
        int i, j, kk;
        double re, im = 0;
        if (!(ss >> i >> j >> kk >> re)) throw std::invalid_argument("ring config: bad table row");
        ss >> im;
        if (i < 0 || i >= n || j < 0 || j >= n || kk < 0 || kk >= n)
            throw std::invalid_argument("ring config: table index out of range");
        r->table.push_back({i, j, kk, cplx(re, im)});
    }
    return r;
}

// Generate the stream a manifold spec describes. Product factors are named
// builtin rings; their generators run long enough for the requested gcd step.
inline CoeffStream build_stream(const ManifoldSpec& spec) {
    if (spec.kind == "projective") return projective_stream(spec.N, spec.M);
    if (spec.kind == "X3") {
        const RingPtr ring = x3_classical_ring();
        return toric_stream(x3_toric_data(ring), ring, spec.M);
    }
    if (spec.kind == "product") {
        auto factor = [&](const std::string& nm, int deep) {
            if (nm.size() >= 2 && nm[0] == 'P')
                return projective_stream(std::stoi(nm.substr(1)), deep);
            throw std::invalid_argument("build_stream: product factors must be projective");
        };
        const RingPtr ra = ring_by_name(spec.factors[0]);
        const RingPtr rb = ring_by_name(spec.factors[1]);
        const int r = std::gcd(ra->fano_index, rb->fano_index);
        const int deepA = (r * spec.M) / ra->fano_index + 1;
        const int deepB = (r * spec.M) / rb->fano_index + 1;
        const CoeffStream sx = factor(spec.factors[0], deepA);
        const CoeffStream sy = factor(spec.factors[1], deepB);
        return product_stream(sx, sy, spec.M);
    }
    if (spec.kind == "hypersurface") {
        if (spec.ambient.size() < 2 || spec.ambient[0] != 'P')
            throw std::invalid_argument("build_stream: hypersurface ambient must be projective");
        const int N = std::stoi(spec.ambient.substr(1));
        return hypersurface_stream(projective_stream(N, spec.M), spec.d, spec.M);
    }
    throw std::invalid_argument("build_stream: unsupported kind '" + spec.kind + "'");
}

// ----------------------------------------------------------------------
// report emission

namespace detail {

inline std::string fmt_sci(double v, int sig) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*e", sig - 1, v);
    return buf;
}

}  // namespace detail

inline nlohmann::json class_to_json(const ClassValue& a) {
    nlohmann::json arr = nlohmann::json::array();
    for (const cplx& z : a.c) arr.push_back({z.real(), z.imag()});
    return arr;
}

inline nlohmann::json scaling_to_json(const AmlScaling& sc) {
    nlohmann::json j;
    j["T"] = sc.T;
    j["theta"] = sc.theta;
    j["A"] = class_to_json(sc.A);
    j["residuals"] = sc.residuals;
    j["method"] = sc.method;
    return j;
}

inline nlohmann::json spectrum_to_json(const SpectrumReport& rep) {
    nlohmann::json j;
    nlohmann::json eigs = nlohmann::json::array();
    for (const cplx& z : rep.eigenvalues) eigs.push_back({z.real(), z.imag()});
    j["eigenvalues"] = eigs;
    j["spectral_radius"] = rep.spectral_radius;
    if (rep.rightmost)
        j["rightmost"] = {rep.rightmost->real(), rep.rightmost->imag()};
    else
        j["rightmost"] = nullptr;
    j["theta_candidates"] = rep.theta_candidates;
    return j;
}

inline nlohmann::json rl_report_to_json(const RlReport& rep) {
    nlohmann::json j;
    j["t_grid"] = rep.t_grid;
    j["semigroup_residuals"] = rep.semigroup_residuals;
    j["prop3_scaled_residuals"] = rep.prop3_scaled_residuals;
    j["prop3_decreasing"] = rep.prop3_decreasing;
    j["prop4_scaled_norms"] = rep.prop4_scaled_norms;
    j["prop4_slope"] = rep.prop4_slope;
    j["prop4_subpolynomial"] = rep.prop4_subpolynomial;
    return j;
}

// CSV columns phi, t, deviation, decay_ratio; the non-applicable column is
// left empty. 17 significant digits.
inline std::string continuous_to_csv(const ContinuousReport& rep) {
    std::string out = "phi,t,deviation,decay_ratio\n";
    for (const ContinuousRow& row : rep.rows) {
        out += detail::fmt_sci(row.phi, 17) + "," + detail::fmt_sci(row.t, 17) + ",";
        if (row.aligned)
            out += detail::fmt_sci(row.deviation, 17) + ",";
        else
            out += "," + detail::fmt_sci(row.decay_ratio, 17);
        out += "\n";
    }
    return out;
}

// Table of scaled values over the given rows: one line per m with re/im
// columns per basis element. presentation = true mirrors the published
// layout: values in units of 1e-3 rounded to 6 significant digits;
// otherwise raw values at 17 significant digits.
inline std::string table_csv(const CoeffStream& s, double T, double theta,
                             const std::vector<int>& rows, bool presentation) {
    const std::vector<ClassValue> scaled = scale_coefficients(s, T, theta, ScaleMode::table);
    std::string out = "m";
    for (const std::string& b : s.ring->basis) out += "," + b + "_re," + b + "_im";
    out += "\n";
    const double unit = presentation ? 1e3 : 1.0;
    const int sig = presentation ? 6 : 17;
    for (int m : rows) {
        if (m < 0 || m > s.M()) throw std::invalid_argument("table_csv: row out of range");
        out += std::to_string(m);
        for (const cplx& z : scaled[m].c)
            out += "," + detail::fmt_sci(z.real() * unit, sig) + "," +
                   detail::fmt_sci(z.imag() * unit, sig);
        out += "\n";
    }
    return out;
}

}  // namespace jfan
