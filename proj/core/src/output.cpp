#include "heatmem/output.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace heatmem {

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string Table::to_csv() const
{
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i)
        out += (i ? "," : "") + columns[i];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + format_double(row[i]);
        out += '\n';
    }
    return out;
}

Table reports_table(const std::vector<EnergyReport>& reports)
{
    Table t;
    t.columns = {"t",       "x2sq",       "v1sq",        "m1sq",
                 "m0sq",    "energy",     "dual",        "pairing",
                 "tail_sup", "slope_m1sq", "identity_residual", "inequality_residual",
                 "l4_bulk", "lr_boundary"};
    for (const auto& r : reports)
        t.rows.push_back({r.t, r.x2sq, r.v1sq, r.m1sq, r.m0sq, r.energy, r.dual, r.pairing, r.tail_sup,
                          r.slope_m1sq, r.identity_residual, r.inequality_residual, r.l4_bulk, r.lr_boundary});
    return t;
}

std::string sha256_hex(std::string_view data)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view contents)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

std::string manifest(const std::filesystem::path& dir, const std::vector<std::string>& files)
{
    std::vector<std::string> sorted = files;
    std::sort(sorted.begin(), sorted.end());
    std::string out;
    for (const auto& name : sorted) {
        std::ifstream in(dir / name, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot read " + (dir / name).string());
        const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        out += sha256_hex(data) + "  " + name + "\n";
    }
    return out;
}

}  // namespace heatmem
