#ifndef PATCHDCT_SYNTHETIC_HPP
#define PATCHDCT_SYNTHETIC_HPP

#include <cstdint>

#include "patchdct/image.hpp"

namespace patchdct {

/// Seeded smooth random field: a few low-frequency cosine waves per channel
/// plus faint pixel noise, kept inside [0.02, 0.98].
ImageTensor synthetic_image(std::uint64_t seed, const Shape& shape);

}  // namespace patchdct

#endif  // PATCHDCT_SYNTHETIC_HPP
