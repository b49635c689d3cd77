#include "selflow/field_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace selflow {
namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void read_exact(std::istream& is, unsigned char* dst, std::size_t n) {
    is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n) throw IoError("truncated snapshot");
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    read_exact(is, b, 4);
    return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
           std::uint32_t{b[3]} << 24;
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    read_exact(is, b, 8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= std::uint64_t{b[k]} << (8 * k);
    return std::bit_cast<double>(v);
}

template <std::size_t K>
Field<K> read_values(std::istream& is, const Grid& g) {
    Field<K> f(g);
    for (double& v : f.flat()) v = get_f64(is);
    if (!f.all_finite()) throw IoError("snapshot contains non-finite values");
    return f;
}

}  // namespace

template <std::size_t K>
void write_snapshot(std::ostream& os, const Field<K>& f) {
    os.write(snapshot_magic, sizeof snapshot_magic);
    put_u32(os, static_cast<std::uint32_t>(K));
    put_u32(os, static_cast<std::uint32_t>(f.grid().nx()));
    put_u32(os, static_cast<std::uint32_t>(f.grid().ny()));
    const char code = static_cast<char>(f.grid().bc_code());
    os.write(&code, 1);
    for (double v : f.flat()) put_f64(os, v);
    if (!os) throw IoError("failed writing snapshot");
}

template <std::size_t K>
void write_snapshot(const std::filesystem::path& path, const Field<K>& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write_snapshot(os, f);
}

AnyField read_snapshot(std::istream& is, double lx, double ly) {
    unsigned char magic[16];
    read_exact(is, magic, 16);
    if (std::memcmp(magic, snapshot_magic, 16) != 0) throw IoError("not a field snapshot");
    const std::uint32_t k = get_u32(is);
    const std::uint32_t nx = get_u32(is);
    const std::uint32_t ny = get_u32(is);
    unsigned char code;
    read_exact(is, &code, 1);
    if (nx > (1u << 16) || ny > (1u << 16)) throw IoError("snapshot dimensions out of range");
    Grid g = [&] {
        try {
            return Grid::from_bc_code(code, static_cast<int>(nx), static_cast<int>(ny), lx, ly);
        } catch (const ArgumentError& e) {
            throw IoError(std::string("bad snapshot header: ") + e.what());
        }
    }();
    switch (k) {
        case 1: return read_values<1>(is, g);
        case 2: return read_values<2>(is, g);
        case 3: return read_values<3>(is, g);
        default: throw IoError("unsupported component count " + std::to_string(k));
    }
}

AnyField read_snapshot(const std::filesystem::path& path, double lx, double ly) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    return read_snapshot(is, lx, ly);
}

template <std::size_t K>
void write_csv(std::ostream& os, const Field<K>& f) {
    os << "x,y";
    for (std::size_t c = 0; c < K; ++c) os << ",c" << c;
    os << '\n' << std::setprecision(17);
    const Grid& g = f.grid();
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            os << g.x(i) << ',' << g.y(j);
            for (double v : f(i, j)) os << ',' << v;
            os << '\n';
        }
    }
    if (!os) throw IoError("failed writing csv");
}

#define SELFLOW_INSTANTIATE(K)                                                      \
    template void write_snapshot<K>(std::ostream&, const Field<K>&);                \
    template void write_snapshot<K>(const std::filesystem::path&, const Field<K>&); \
    template void write_csv<K>(std::ostream&, const Field<K>&);

SELFLOW_INSTANTIATE(1)
SELFLOW_INSTANTIATE(2)
SELFLOW_INSTANTIATE(3)
#undef SELFLOW_INSTANTIATE

}  // namespace selflow
