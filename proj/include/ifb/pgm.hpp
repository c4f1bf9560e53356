#pragma once

#include "ifb/common.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace ifb {

/// Grayscale image, row-major, intensities normally in [0, 1].
struct Image {
    int rows = 0;
    int cols = 0;
    Vector pixels;
};

enum class PgmEncoding { ascii, binary };

/// Parses P2 or P5 data (maxval 1..65535); samples are divided by maxval.
/// `maxval_out`, if given, receives the file's maxval.
Image pgm_parse(std::string_view data, int* maxval_out = nullptr);

Image pgm_read(const std::filesystem::path& path, int* maxval_out = nullptr);

/// Clamps to [0, 1] and quantises to round(v * maxval).
std::string pgm_encode(const Image& image, PgmEncoding encoding = PgmEncoding::binary, int maxval = 255);

void pgm_write(const std::filesystem::path& path, const Image& image, PgmEncoding encoding = PgmEncoding::binary,
               int maxval = 255);

} // namespace ifb
