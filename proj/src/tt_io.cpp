#include "qtt/tt_io.hpp"

#include "qtt/error.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace qtt {

namespace {

constexpr std::array<char, 4> kMagic{'Q', 'T', 'T', '1'};

void put_u32(std::ostream& os, std::uint32_t v)
{
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b.data(), b.size());
}

void put_f64(std::ostream& os, double x)
{
    const auto v = std::bit_cast<std::uint64_t>(x);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b.data(), b.size());
}

void get_bytes(std::istream& is, char* dst, std::size_t n)
{
    is.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw FormatError("tt_read: truncated payload");
}

std::uint32_t get_u32(std::istream& is)
{
    std::array<unsigned char, 4> b{};
    get_bytes(is, reinterpret_cast<char*>(b.data()), b.size());
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is)
{
    std::array<unsigned char, 8> b{};
    get_bytes(is, reinterpret_cast<char*>(b.data()), b.size());
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

std::uint32_t checked_u32(std::size_t v, const char* what)
{
    if (v > 0xffffffffu)
        throw FormatError(std::string("tt_write: ") + what + " does not fit in u32");
    return static_cast<std::uint32_t>(v);
}

} // namespace

void tt_write(const TensorTrain& tt, std::ostream& sink)
{
    sink.write(kMagic.data(), kMagic.size());
    const char version = static_cast<char>(kContainerVersion);
    sink.write(&version, 1);
    const std::size_t K = tt.depth();
    put_u32(sink, checked_u32(K, "depth"));
    put_u32(sink, checked_u32(K, "dim count"));
    for (std::size_t e : tt.external_dims())
        put_u32(sink, checked_u32(e, "external dim"));
    for (std::size_t r : tt.ranks())
        put_u32(sink, checked_u32(r, "rank"));
    for (const auto& c : tt.cores())
        for (double v : c.data())
            put_f64(sink, v);
    if (!sink)
        throw IoError("tt_write: stream error");
}

TensorTrain tt_read(std::istream& source)
{
    std::array<char, 4> magic{};
    get_bytes(source, magic.data(), magic.size());
    if (magic != kMagic)
        throw FormatError("tt_read: bad magic");
    char version = 0;
    get_bytes(source, &version, 1);
    if (static_cast<std::uint8_t>(version) != kContainerVersion)
        throw FormatError("tt_read: unsupported version " +
                          std::to_string(static_cast<unsigned>(static_cast<std::uint8_t>(version))));

    const std::uint32_t K = get_u32(source);
    const std::uint32_t ndims = get_u32(source);
    if (K == 0)
        throw FormatError("tt_read: depth must be positive");
    if (ndims != K)
        throw FormatError("tt_read: dim count differs from depth");
    std::vector<std::size_t> dims(K), ranks(K + 1);
    for (auto& e : dims)
        e = get_u32(source);
    for (auto& r : ranks)
        r = get_u32(source);
    if (ranks.front() != 1 || ranks.back() != 1)
        throw ValidationError("tt_read: boundary ranks must be 1");

    std::vector<Core> cores;
    cores.reserve(K);
    for (std::uint32_t k = 0; k < K; ++k) {
        if (dims[k] == 0 || ranks[k] == 0 || ranks[k + 1] == 0)
            throw ValidationError("tt_read: zero dimension in core " + std::to_string(k + 1));
        const std::uint64_t n = std::uint64_t{dims[k]} * ranks[k] * ranks[k + 1];
        if (n > (std::uint64_t{1} << 31))
            throw FormatError("tt_read: implausible core size in core " + std::to_string(k + 1));
        std::vector<double> data(static_cast<std::size_t>(n));
        for (auto& v : data)
            v = get_f64(source);
        cores.emplace_back(dims[k], ranks[k], ranks[k + 1], std::move(data));
    }
    return TensorTrain(std::move(cores));
}

void tt_save(const TensorTrain& tt, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open " + path.string() + " for writing");
    tt_write(tt, os);
}

TensorTrain tt_load(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open " + path.string());
    return tt_read(is);
}

} // namespace qtt
