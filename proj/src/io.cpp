#include "cousinlab/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cousinlab {

namespace {
constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const unsigned char* data, size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (size_t i = 0; i < len; i += 3) {
        unsigned int v = static_cast<unsigned int>(data[i]) << 16;
        if (i + 1 < len) v |= static_cast<unsigned int>(data[i + 1]) << 8;
        if (i + 2 < len) v |= static_cast<unsigned int>(data[i + 2]);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(i + 1 < len ? kB64Alphabet[(v >> 6) & 63] : '=');
        out.push_back(i + 2 < len ? kB64Alphabet[v & 63] : '=');
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    int table[256];
    std::fill(std::begin(table), std::end(table), -1);
    for (int i = 0; i < 64; ++i) table[static_cast<unsigned char>(kB64Alphabet[i])] = i;

    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    unsigned int buffer = 0;
    int bits = 0;
    for (const char ch : text) {
        if (ch == '=' || ch == '\n' || ch == '\r') continue;
        const int v = table[static_cast<unsigned char>(ch)];
        if (v < 0) throw Error("base64: invalid character");
        buffer = (buffer << 6) | static_cast<unsigned int>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((buffer >> bits) & 0xFF));
        }
    }
    return out;
}

json grid_to_json(const ImmersionGrid& g) {
    json j;
    j["format"] = "cousinlab-grid";
    j["version"] = 1;
    j["ambient"] = ambient_name(g.ambient);
    j["nx"] = g.nx;
    j["ny"] = g.ny;
    j["hx"] = g.hx;
    j["hy"] = g.hy;
    j["x0"] = g.x0;
    j["y0"] = g.y0;
    json edges = json::array();
    static constexpr const char* side_names[4] = {"ymin", "xmax", "ymax", "xmin"};
    for (int s = 0; s < 4; ++s) {
        edges.push_back({{"side", side_names[s]},
                         {"symmetry_curve", g.boundary[static_cast<size_t>(s)].symmetry_curve},
                         {"clip_offset", g.boundary[static_cast<size_t>(s)].clip_offset}});
    }
    j["boundary"] = edges;

    std::vector<double> flat;
    flat.reserve(g.values.size() * 4);
    for (const Quaterniond& q : g.values) {
        flat.push_back(q.w);
        flat.push_back(q.x());
        flat.push_back(q.y());
        flat.push_back(q.z());
    }
    j["encoding"] = "f64le-wxyz";
    j["values_b64"] = base64_encode(reinterpret_cast<const unsigned char*>(flat.data()),
                                    flat.size() * sizeof(double));
    return j;
}

ImmersionGrid grid_from_json(const json& j) {
    if (j.value("format", "") != std::string("cousinlab-grid"))
        throw Error("grid_from_json: not a cousinlab grid record");
    const std::string amb = j.at("ambient").get<std::string>();
    ImmersionGrid g(amb == "R3" ? Ambient::R3 : Ambient::S3, j.at("nx").get<int>(),
                    j.at("ny").get<int>(), j.at("hx").get<double>(), j.at("hy").get<double>());
    g.x0 = j.value("x0", 0.0);
    g.y0 = j.value("y0", 0.0);
    if (j.contains("boundary")) {
        int s = 0;
        for (const auto& e : j.at("boundary")) {
            if (s >= 4) break;
            g.boundary[static_cast<size_t>(s)].symmetry_curve =
                e.value("symmetry_curve", false);
            g.boundary[static_cast<size_t>(s)].clip_offset = e.value("clip_offset", 0.0);
            ++s;
        }
    }
    const auto raw = base64_decode(j.at("values_b64").get<std::string>());
    const size_t expected = static_cast<size_t>(g.nx) * g.ny * 4 * sizeof(double);
    if (raw.size() != expected)
        throw Error("grid_from_json: payload has " + std::to_string(raw.size()) +
                    " bytes, expected " + std::to_string(expected));
    std::vector<double> flat(static_cast<size_t>(g.nx) * g.ny * 4);
    std::memcpy(flat.data(), raw.data(), raw.size());
    for (size_t k = 0; k < g.values.size(); ++k) {
        g.values[k] =
            Quaterniond(flat[4 * k], flat[4 * k + 1], flat[4 * k + 2], flat[4 * k + 3]);
    }
    return g;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_grid(const ImmersionGrid& g, const std::string& path) {
    write_text_file(path, grid_to_json(g).dump(2) + "\n");
}

ImmersionGrid load_grid(const std::string& path) {
    return grid_from_json(json::parse(read_text_file(path)));
}

void export_obj(const ImmersionGrid& g, const std::string& path) {
    if (g.ambient != Ambient::R3) throw Error("export_obj expects an R3 grid");
    std::ostringstream out;
    out << "# cousinlab grid export, " << g.nx << " x " << g.ny << " nodes\n";
    char buf[128];
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const Quaterniond& q = g.at(i, j);
            std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", q.x(), q.y(), q.z());
            out << buf;
        }
    }
    const auto vid = [&](int i, int j) { return i * g.ny + j + 1; }; // 1-based
    for (int i = 0; i + 1 < g.nx; ++i) {
        for (int j = 0; j + 1 < g.ny; ++j) {
            out << "f " << vid(i, j) << ' ' << vid(i + 1, j) << ' ' << vid(i + 1, j + 1)
                << '\n';
            out << "f " << vid(i, j) << ' ' << vid(i + 1, j + 1) << ' ' << vid(i, j + 1)
                << '\n';
        }
    }
    write_text_file(path, out.str());
}

ObjMesh import_obj(const std::string& path) {
    ObjMesh mesh;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) {
            std::istringstream ls(line.substr(2));
            Eigen::Vector3d v;
            ls >> v[0] >> v[1] >> v[2];
            if (!ls) throw Error("import_obj: malformed vertex line");
            mesh.vertices.push_back(v);
        } else if (line.rfind("f ", 0) == 0) {
            std::istringstream ls(line.substr(2));
            std::array<int, 3> f{};
            ls >> f[0] >> f[1] >> f[2];
            if (!ls) throw Error("import_obj: malformed face line");
            for (int& idx : f) idx -= 1;
            mesh.faces.push_back(f);
        }
    }
    return mesh;
}

void export_profile_csv(const UnduloidProfile& p, const std::string& path) {
    std::ostringstream out;
    out << "s,r,z,phi,force\n";
    char buf[192];
    for (size_t k = 0; k < p.s.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.s[k], p.r[k],
                      p.z[k], p.phi[k], UnduloidProfile::force(p.r[k], p.phi[k]));
        out << buf;
    }
    write_text_file(path, out.str());
}

} // namespace cousinlab
