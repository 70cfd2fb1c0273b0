#include "shellforge/mesh_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <unordered_map>
#include <sstream>

#include "shellforge/error.hpp"

namespace shellforge {

namespace {

constexpr std::size_t kStlHeaderSize = 80;
constexpr std::size_t kStlTriangleSize = 50;

// STL stores a vertex soup; fold exactly-equal coordinates back into shared
// indices so edge pairing sees the connectivity. Coordinates are untouched.
struct ExactWelder {
    TriangleMesh mesh;
    std::unordered_map<std::string, std::uint32_t> seen;

    std::uint32_t add(const Vec3& v) {
        std::string key(reinterpret_cast<const char*>(&v), sizeof(Vec3));
        auto it = seen.find(key);
        if (it != seen.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(v);
        seen.emplace(std::move(key), id);
        return id;
    }
    void triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
        mesh.triangles.push_back({add(a), add(b), add(c)});
    }
};

float read_f32(const std::uint8_t* p) {
    std::uint32_t u = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                      (static_cast<std::uint32_t>(p[2]) << 16) |
                      (static_cast<std::uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

void push_f32(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    out.push_back(static_cast<std::uint8_t>(u & 0xff));
    out.push_back(static_cast<std::uint8_t>((u >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((u >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((u >> 24) & 0xff));
}

TriangleMesh parse_stl_binary(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kStlHeaderSize + 4)
        throw Error(ErrorCode::TruncatedFile, "binary STL shorter than header + count (" +
                                                  std::to_string(bytes.size()) + " bytes)");
    std::uint32_t count = static_cast<std::uint32_t>(bytes[80]) |
                          (static_cast<std::uint32_t>(bytes[81]) << 8) |
                          (static_cast<std::uint32_t>(bytes[82]) << 16) |
                          (static_cast<std::uint32_t>(bytes[83]) << 24);
    std::size_t expected = kStlHeaderSize + 4 + static_cast<std::size_t>(count) * kStlTriangleSize;
    if (bytes.size() != expected)
        throw Error(ErrorCode::TruncatedFile,
                    "declared " + std::to_string(count) + " triangles needs " +
                        std::to_string(expected) + " bytes, file has " +
                        std::to_string(bytes.size()));

    ExactWelder w;
    w.mesh.triangles.reserve(count);
    const std::uint8_t* p = bytes.data() + kStlHeaderSize + 4;
    for (std::uint32_t t = 0; t < count; ++t, p += kStlTriangleSize) {
        // Skip the stored normal; orientation comes from vertex order.
        Vec3 v[3];
        for (int k = 0; k < 3; ++k) {
            const std::uint8_t* q = p + 12 + k * 12;
            v[k] = {static_cast<double>(read_f32(q)), static_cast<double>(read_f32(q + 4)),
                    static_cast<double>(read_f32(q + 8))};
        }
        w.triangle(v[0], v[1], v[2]);
    }
    return std::move(w.mesh);
}

TriangleMesh parse_stl_ascii(const std::vector<std::uint8_t>& bytes) {
    std::string text(bytes.begin(), bytes.end());
    std::istringstream in(text);
    ExactWelder w;
    std::string line;
    std::size_t line_no = 0;
    std::vector<Vec3> loop;
    bool in_loop = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "solid" || tok == "endsolid" || tok == "endfacet") continue;
        if (tok == "facet") continue;  // "facet normal nx ny nz" — normal ignored
        if (tok == "outer") {
            in_loop = true;
            loop.clear();
            continue;
        }
        if (tok == "endloop") {
            if (loop.size() != 3)
                throw Error(ErrorCode::MalformedRecord,
                            "loop with " + std::to_string(loop.size()) + " vertices at line " +
                                std::to_string(line_no));
            w.triangle(loop[0], loop[1], loop[2]);
            in_loop = false;
            continue;
        }
        if (tok == "vertex") {
            if (!in_loop)
                throw Error(ErrorCode::MalformedRecord,
                            "vertex outside loop at line " + std::to_string(line_no));
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z))
                throw Error(ErrorCode::MalformedRecord,
                            "unparseable vertex at line " + std::to_string(line_no));
            loop.push_back(v);
            continue;
        }
        throw Error(ErrorCode::MalformedRecord,
                    "unexpected token '" + tok + "' at line " + std::to_string(line_no));
    }
    if (in_loop) throw Error(ErrorCode::TruncatedFile, "file ends inside a facet loop");
    return std::move(w.mesh);
}

TriangleMesh parse_obj(const std::vector<std::uint8_t>& bytes) {
    std::string text(bytes.begin(), bytes.end());
    std::istringstream in(text);
    TriangleMesh mesh;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok[0] == '#') continue;
        if (tok == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z))
                throw Error(ErrorCode::MalformedRecord,
                            "unparseable vertex at line " + std::to_string(line_no));
            mesh.vertices.push_back(v);
            continue;
        }
        if (tok == "f") {
            std::vector<std::string> refs;
            std::string r;
            while (ls >> r) refs.push_back(r);
            if (refs.size() != 3)
                throw Error(ErrorCode::UnsupportedFeature,
                            "only triangular faces are supported (line " +
                                std::to_string(line_no) + " has " + std::to_string(refs.size()) +
                                " indices)");
            std::array<std::uint32_t, 3> tri;
            for (int k = 0; k < 3; ++k) {
                if (refs[k].find('/') != std::string::npos)
                    throw Error(ErrorCode::UnsupportedFeature,
                                "face index with attributes ('" + refs[k] + "') at line " +
                                    std::to_string(line_no));
                long idx = 0;
                try {
                    idx = std::stol(refs[k]);
                } catch (const std::exception&) {
                    throw Error(ErrorCode::MalformedRecord,
                                "unparseable face index '" + refs[k] + "' at line " +
                                    std::to_string(line_no));
                }
                if (idx < 1 || static_cast<std::size_t>(idx) > mesh.vertices.size())
                    throw Error(ErrorCode::IndexOutOfRange,
                                "face index " + std::to_string(idx) + " at line " +
                                    std::to_string(line_no));
                tri[k] = static_cast<std::uint32_t>(idx - 1);
            }
            mesh.triangles.push_back(tri);
            continue;
        }
        throw Error(ErrorCode::UnsupportedFeature,
                    "OBJ record '" + tok + "' at line " + std::to_string(line_no) +
                        " (only v and f are supported)");
    }
    return mesh;
}

std::vector<std::uint8_t> write_stl_binary(const TriangleMesh& mesh) {
    std::vector<std::uint8_t> out;
    out.reserve(kStlHeaderSize + 4 + mesh.triangles.size() * kStlTriangleSize);
    std::string banner = "shellforge binary STL";
    if (!mesh.name.empty()) banner += " | " + mesh.name;
    banner.resize(kStlHeaderSize, ' ');
    out.insert(out.end(), banner.begin(), banner.end());
    std::uint32_t count = static_cast<std::uint32_t>(mesh.triangles.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((count >> (8 * i)) & 0xff));
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        Vec3 n = normalized(mesh.triangle_normal(t));
        push_f32(out, static_cast<float>(n.x));
        push_f32(out, static_cast<float>(n.y));
        push_f32(out, static_cast<float>(n.z));
        for (int k = 0; k < 3; ++k) {
            const Vec3& v = mesh.vertices[mesh.triangles[t][k]];
            push_f32(out, static_cast<float>(v.x));
            push_f32(out, static_cast<float>(v.y));
            push_f32(out, static_cast<float>(v.z));
        }
        out.push_back(0);
        out.push_back(0);
    }
    return out;
}

std::vector<std::uint8_t> write_stl_ascii(const TriangleMesh& mesh) {
    std::string name = mesh.name.empty() ? "mesh" : mesh.name;
    std::string s = "solid " + name + "\n";
    char buf[256];
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        Vec3 n = normalized(mesh.triangle_normal(t));
        std::snprintf(buf, sizeof buf, "  facet normal %.6g %.6g %.6g\n", n.x, n.y, n.z);
        s += buf;
        s += "    outer loop\n";
        for (int k = 0; k < 3; ++k) {
            const Vec3& v = mesh.vertices[mesh.triangles[t][k]];
            std::snprintf(buf, sizeof buf, "      vertex %.6g %.6g %.6g\n", v.x, v.y, v.z);
            s += buf;
        }
        s += "    endloop\n  endfacet\n";
    }
    s += "endsolid " + name + "\n";
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

std::vector<std::uint8_t> write_obj(const TriangleMesh& mesh) {
    std::string s;
    char buf[256];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
        s += buf;
    }
    for (const auto& tri : mesh.triangles) {
        std::snprintf(buf, sizeof buf, "f %u %u %u\n", tri[0] + 1, tri[1] + 1, tri[2] + 1);
        s += buf;
    }
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

}  // namespace

TriangleMesh parse_mesh(const std::vector<std::uint8_t>& bytes, MeshFormat format) {
    switch (format) {
        case MeshFormat::StlBinary: return parse_stl_binary(bytes);
        case MeshFormat::StlAscii: return parse_stl_ascii(bytes);
        case MeshFormat::Obj: return parse_obj(bytes);
    }
    throw Error(ErrorCode::UsageError, "unknown mesh format");
}

std::vector<std::uint8_t> write_mesh(const TriangleMesh& mesh, MeshFormat format) {
    const std::uint32_t n = static_cast<std::uint32_t>(mesh.vertices.size());
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k)
            if (tri[k] >= n) throw Error(ErrorCode::IndexOutOfRange, "invalid triangle index");
    switch (format) {
        case MeshFormat::StlBinary: return write_stl_binary(mesh);
        case MeshFormat::StlAscii: return write_stl_ascii(mesh);
        case MeshFormat::Obj: return write_obj(mesh);
    }
    throw Error(ErrorCode::UsageError, "unknown mesh format");
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path);
}

TriangleMesh load_mesh(const std::string& path) {
    std::vector<std::uint8_t> bytes = read_file_bytes(path);
    auto ends_with = [&](const char* suffix) {
        std::string s = path;
        for (auto& c : s) c = static_cast<char>(std::tolower(c));
        std::string suf = suffix;
        return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
    };
    MeshFormat format;
    if (ends_with(".obj")) {
        format = MeshFormat::Obj;
    } else {
        // Binary iff the byte count matches the declared triangle count.
        format = MeshFormat::StlAscii;
        if (bytes.size() >= kStlHeaderSize + 4) {
            std::uint32_t count = static_cast<std::uint32_t>(bytes[80]) |
                                  (static_cast<std::uint32_t>(bytes[81]) << 8) |
                                  (static_cast<std::uint32_t>(bytes[82]) << 16) |
                                  (static_cast<std::uint32_t>(bytes[83]) << 24);
            if (bytes.size() ==
                kStlHeaderSize + 4 + static_cast<std::size_t>(count) * kStlTriangleSize)
                format = MeshFormat::StlBinary;
        }
    }
    TriangleMesh mesh = parse_mesh(bytes, format);
    std::size_t slash = path.find_last_of("/\\");
    mesh.name = slash == std::string::npos ? path : path.substr(slash + 1);
    return mesh;
}

void save_mesh(const TriangleMesh& mesh, const std::string& path) {
    auto ends_with = [&](const char* suffix) {
        std::string s = path;
        for (auto& c : s) c = static_cast<char>(std::tolower(c));
        std::string suf = suffix;
        return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
    };
    MeshFormat format = ends_with(".obj") ? MeshFormat::Obj : MeshFormat::StlBinary;
    write_file_bytes(path, write_mesh(mesh, format));
}

}  // namespace shellforge
