#include "stokhom/fielddump.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stokhom {

namespace {
const char* kMagic = "STOKES-HOMOG-FIELD v1";
constexpr long kMaxDim = 1 << 20;

bool kind_valid(const std::string& k) {
    return k == "cell" || k == "mac-u" || k == "mac-v" || k == "mac-p";
}

void put_le(std::ostream& os, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (bits >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_le(const unsigned char* b) {
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}
}  // namespace

void dump_field(const std::string& path, const FieldDump& f) {
    if (!kind_valid(f.kind)) throw std::invalid_argument("dump_field: invalid kind '" + f.kind + "'");
    if (f.meta.find('\n') != std::string::npos)
        throw std::invalid_argument("dump_field: meta must be a single line");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("dump_field: cannot open '" + path + "' for writing");
    os << kMagic << "\n";
    os << "kind = " << f.kind << "\n";
    os << "rows = " << f.data.nx << "\n";
    os << "cols = " << f.data.ny << "\n";
    if (!f.meta.empty()) os << "meta = " << f.meta << "\n";
    os << "END\n";
    for (double v : f.data.a) put_le(os, v);
    if (!os) throw std::runtime_error("dump_field: write failed for '" + path + "'");
}

FieldDump load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_field: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || line != kMagic)
        throw std::runtime_error("load_field: magic mismatch in '" + path + "'");
    FieldDump f;
    long rows = -1, cols = -1;
    bool end_seen = false;
    while (std::getline(is, line)) {
        if (line == "END") {
            end_seen = true;
            break;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("load_field: malformed header line '" + line + "'");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!val.empty() && val.front() == ' ') val.erase(val.begin());
        if (key == "kind")
            f.kind = val;
        else if (key == "rows")
            rows = std::strtol(val.c_str(), nullptr, 10);
        else if (key == "cols")
            cols = std::strtol(val.c_str(), nullptr, 10);
        else if (key == "meta")
            f.meta = val;
        else
            throw std::runtime_error("load_field: unknown header key '" + key + "'");
    }
    if (!end_seen) throw std::runtime_error("load_field: header not terminated by END");
    if (!kind_valid(f.kind)) throw std::runtime_error("load_field: invalid kind '" + f.kind + "'");
    if (rows <= 0 || cols <= 0 || rows > kMaxDim || cols > kMaxDim || rows * cols > (long(1) << 28))
        throw std::runtime_error("load_field: dims out of range");

    size_t count = size_t(rows) * size_t(cols);
    std::vector<unsigned char> payload(count * 8);
    is.read(reinterpret_cast<char*>(payload.data()), payload.size());
    if (size_t(is.gcount()) != payload.size())
        throw std::runtime_error("load_field: truncated payload (expected " + std::to_string(payload.size()) +
                                 " bytes, got " + std::to_string(is.gcount()) + ")");
    char extra;
    if (is.read(&extra, 1))
        throw std::runtime_error("load_field: payload length mismatch (trailing bytes)");

    f.data = Array2D(int(rows), int(cols));
    for (size_t m = 0; m < count; ++m) f.data.a[m] = get_le(&payload[m * 8]);
    return f;
}

}  // namespace stokhom
