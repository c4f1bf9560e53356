#include "ifb/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

namespace ifb {

namespace {

class PgmReader {
public:
    PgmReader(std::string_view data, std::size_t pos) : data_(data), pos_(pos) {}

    std::size_t offset() const noexcept { return pos_; }
    /// where the most recent integer token began
    std::size_t token_start() const noexcept { return token_start_; }

    // whitespace and '#' comments between header tokens
    void skip_separators()
    {
        while (pos_ < data_.size()) {
            const char ch = data_[pos_];
            if (ch == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r')
                    ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long read_uint(const char* what)
    {
        skip_separators();
        const std::size_t start = token_start_ = pos_;
        long value = 0;
        while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
            value = value * 10 + (data_[pos_] - '0');
            if (value > std::numeric_limits<int>::max())
                throw MalformedPgm(std::string(what) + " out of range", start);
            ++pos_;
        }
        if (pos_ == start)
            throw MalformedPgm(std::string("expected ") + what, start);
        return value;
    }

    // exactly one whitespace byte separates the header from P5 raster data
    void single_separator()
    {
        if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_])))
            throw MalformedPgm("expected whitespace after header", pos_);
        ++pos_;
    }

    unsigned read_byte()
    {
        if (pos_ >= data_.size())
            throw MalformedPgm("truncated raster", pos_);
        return static_cast<unsigned char>(data_[pos_++]);
    }

private:
    std::string_view data_;
    std::size_t pos_;
    std::size_t token_start_ = 0;
};

} // namespace

Image pgm_parse(std::string_view data, int* maxval_out)
{
    if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5'))
        throw MalformedPgm("magic number must be P2 or P5", 0);
    const bool binary = data[1] == '5';
    PgmReader in(data, 2);

    const long cols = in.read_uint("width");
    const long rows = in.read_uint("height");
    if (cols < 1 || rows < 1)
        throw MalformedPgm("image dimensions must be positive", in.token_start());
    const long maxval = in.read_uint("maxval");
    if (maxval < 1 || maxval > 65535)
        throw MalformedPgm("maxval must lie in [1, 65535]", in.token_start());

    Image img;
    img.rows = static_cast<int>(rows);
    img.cols = static_cast<int>(cols);
    img.pixels.resize(rows * cols);
    const double denom = static_cast<double>(maxval);

    if (binary) {
        in.single_separator();
        for (Index i = 0; i < img.pixels.size(); ++i) {
            const std::size_t at = in.offset();
            unsigned v = in.read_byte();
            if (maxval > 255)
                v = (v << 8) | in.read_byte();
            if (v > static_cast<unsigned>(maxval))
                throw MalformedPgm("sample exceeds maxval", at);
            img.pixels[i] = v / denom;
        }
    } else {
        for (Index i = 0; i < img.pixels.size(); ++i) {
            const long v = in.read_uint("sample");
            if (v > maxval)
                throw MalformedPgm("sample exceeds maxval", in.token_start());
            img.pixels[i] = static_cast<double>(v) / denom;
        }
    }
    if (maxval_out)
        *maxval_out = static_cast<int>(maxval);
    return img;
}

Image pgm_read(const std::filesystem::path& path, int* maxval_out)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ImageLoadError("cannot open " + path.string());
    const std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return pgm_parse(data, maxval_out);
}

std::string pgm_encode(const Image& image, PgmEncoding encoding, int maxval)
{
    if (maxval < 1 || maxval > 65535)
        throw Error("pgm_encode: maxval must lie in [1, 65535]");
    if (image.pixels.size() != Index{image.rows} * image.cols)
        throw DimensionMismatch("pgm_encode", Index{image.rows} * image.cols, image.pixels.size());

    auto quantise = [maxval](double v) {
        const double c = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
        return static_cast<unsigned>(std::lround(c * maxval));
    };

    std::string out = (encoding == PgmEncoding::binary ? "P5\n" : "P2\n") + std::to_string(image.cols) + " " +
                      std::to_string(image.rows) + "\n" + std::to_string(maxval) + "\n";
    if (encoding == PgmEncoding::binary) {
        for (Index i = 0; i < image.pixels.size(); ++i) {
            const unsigned q = quantise(image.pixels[i]);
            if (maxval > 255)
                out.push_back(static_cast<char>(q >> 8));
            out.push_back(static_cast<char>(q & 0xff));
        }
    } else {
        for (int r = 0; r < image.rows; ++r) {
            for (int c = 0; c < image.cols; ++c) {
                if (c)
                    out.push_back(' ');
                out += std::to_string(quantise(image.pixels[Index{r} * image.cols + c]));
            }
            out.push_back('\n');
        }
    }
    return out;
}

void pgm_write(const std::filesystem::path& path, const Image& image, PgmEncoding encoding, int maxval)
{
    const std::string data = pgm_encode(image, encoding, maxval);
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write " + path.string());
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
}

} // namespace ifb
