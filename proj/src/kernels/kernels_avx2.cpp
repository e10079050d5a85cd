// AVX2 lane-parallel transcriptions of the scalar kernels. Each variant
// executes the same IEEE operation sequence as its scalar reference (no FMA,
// same min/max order, same rounding), so outputs are byte-identical; the
// equivalence suite asserts that on random inputs.

#include "ipt/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kernels/lab_common.hpp"

namespace ipt::kernels {
namespace {

using detail::srgb_linear_lut;

inline __m256 cbrt_newton_ps(__m256 x) {
  __m256 y = _mm256_sqrt_ps(_mm256_sqrt_ps(x));
  const __m256 third = _mm256_set1_ps(1.0f / 3.0f);
  for (int i = 0; i < 4; ++i) {
    const __m256 yy = _mm256_mul_ps(y, y);
    const __m256 q = _mm256_div_ps(x, yy);
    y = _mm256_sub_ps(y, _mm256_mul_ps(_mm256_sub_ps(y, q), third));
  }
  return y;
}

void srgb_to_l_u8_avx2(const uint8_t* rgb, size_t px, uint8_t* out) {
  const float* lut = srgb_linear_lut();
  const __m256i byte_mask = _mm256_set1_epi32(0xFF);
  const __m256 yr = _mm256_set1_ps(detail::kYr);
  const __m256 yg = _mm256_set1_ps(detail::kYg);
  const __m256 yb = _mm256_set1_ps(detail::kYb);
  const __m256 eps = _mm256_set1_ps(detail::kLabEps);
  const __m256 kappa = _mm256_set1_ps(detail::kLabKappa);
  const __m256 c16 = _mm256_set1_ps(16.0f);
  const __m256 c116 = _mm256_set1_ps(116.0f);
  const __m256 scale = _mm256_set1_ps(detail::kByteScale);
  const __m256 lo = _mm256_setzero_ps();
  const __m256 hi = _mm256_set1_ps(255.0f);
  const __m256i lin = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);

  size_t i = 0;
  // One epi32 gather pulls r,g,b of a pixel in a single 4-byte read; the
  // last vector stops early so the over-read stays inside the buffer.
  for (; i + 9 <= px; i += 8) {
    const __m256i offs = _mm256_add_epi32(
        _mm256_mullo_epi32(_mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(i)), lin),
                           _mm256_set1_epi32(3)),
        _mm256_setzero_si256());
    const __m256i packed =
        _mm256_i32gather_epi32(reinterpret_cast<const int*>(rgb), offs, 1);
    const __m256i ri = _mm256_and_si256(packed, byte_mask);
    const __m256i gi = _mm256_and_si256(_mm256_srli_epi32(packed, 8), byte_mask);
    const __m256i bi = _mm256_and_si256(_mm256_srli_epi32(packed, 16), byte_mask);
    const __m256 rl = _mm256_i32gather_ps(lut, ri, 4);
    const __m256 gl = _mm256_i32gather_ps(lut, gi, 4);
    const __m256 bl = _mm256_i32gather_ps(lut, bi, 4);

    const __m256 y = _mm256_add_ps(
        _mm256_add_ps(_mm256_mul_ps(yr, rl), _mm256_mul_ps(yg, gl)),
        _mm256_mul_ps(yb, bl));
    const __m256 fy_cube = cbrt_newton_ps(y);
    const __m256 fy_lin =
        _mm256_div_ps(_mm256_add_ps(_mm256_mul_ps(kappa, y), c16), c116);
    const __m256 gt = _mm256_cmp_ps(y, eps, _CMP_GT_OQ);
    const __m256 fy = _mm256_blendv_ps(fy_lin, fy_cube, gt);
    const __m256 l = _mm256_sub_ps(_mm256_mul_ps(c116, fy), c16);
    const __m256 lb = _mm256_mul_ps(l, scale);
    const __m256 clamped = _mm256_min_ps(_mm256_max_ps(lb, lo), hi);
    const __m256i vi = _mm256_cvtps_epi32(clamped);

    // epi32 -> 8 bytes
    const __m256i sh = _mm256_shuffle_epi8(
        vi, _mm256_setr_epi8(0, 4, 8, 12, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1,
                             -1, -1, 0, 4, 8, 12, -1, -1, -1, -1, -1, -1, -1, -1,
                             -1, -1, -1, -1));
    const uint32_t lo32 = static_cast<uint32_t>(_mm256_extract_epi32(sh, 0));
    const uint32_t hi32 = static_cast<uint32_t>(_mm256_extract_epi32(sh, 4));
    std::copy_n(reinterpret_cast<const uint8_t*>(&lo32), 4, out + i);
    std::copy_n(reinterpret_cast<const uint8_t*>(&hi32), 4, out + i + 4);
  }
  for (; i < px; ++i) {
    const float l = detail::lightness_byte_f32(lut[rgb[3 * i]], lut[rgb[3 * i + 1]],
                                               lut[rgb[3 * i + 2]]);
    const float c = std::min(std::max(l, 0.0f), 255.0f);
    out[i] = static_cast<uint8_t>(std::lrintf(c));
  }
}

void sub_normalize_u8_avx2(const uint8_t* prev, const uint8_t* now, size_t n,
                           uint8_t* out) {
  const __m256i bias = _mm256_set1_epi16(128);
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i p0 = _mm256_cvtepu8_epi16(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(prev + i)));
    const __m256i p1 = _mm256_cvtepu8_epi16(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(prev + i + 16)));
    const __m256i n0 = _mm256_cvtepu8_epi16(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(now + i)));
    const __m256i n1 = _mm256_cvtepu8_epi16(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(now + i + 16)));
    const __m256i d0 = _mm256_add_epi16(_mm256_sub_epi16(n0, p0), bias);
    const __m256i d1 = _mm256_add_epi16(_mm256_sub_epi16(n1, p1), bias);
    const __m256i packed = _mm256_permute4x64_epi64(_mm256_packus_epi16(d0, d1), 0xD8);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), packed);
  }
  for (; i < n; ++i) {
    const int d = 128 + static_cast<int>(now[i]) - static_cast<int>(prev[i]);
    out[i] = static_cast<uint8_t>(std::clamp(d, 0, 255));
  }
}

uint64_t sad_u8_avx2(const uint8_t* a, const uint8_t* b, size_t n) {
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(va, vb));
  }
  alignas(32) uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  uint64_t sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) {
    sum += static_cast<uint64_t>(a[i] > b[i] ? a[i] - b[i] : b[i] - a[i]);
  }
  return sum;
}

void threshold_u8_avx2(const uint8_t* in, size_t n, uint8_t t, uint8_t* out) {
  const __m256i tv = _mm256_set1_epi8(static_cast<char>(t));
  const __m256i ones = _mm256_set1_epi8(static_cast<char>(0xFF));
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i));
    const __m256i le = _mm256_cmpeq_epi8(_mm256_subs_epu8(v, tv), _mm256_setzero_si256());
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_andnot_si256(le, ones));
  }
  for (; i < n; ++i) out[i] = in[i] > t ? 255 : 0;
}

template <bool kMax>
void row_minmax_u8_avx2(const uint8_t* in, int w, int radius, uint8_t* out) {
  auto scalar_one = [&](int x) {
    uint8_t m = kMax ? 0 : 255;
    for (int k = -radius; k <= radius; ++k) {
      const uint8_t v = in[std::clamp(x + k, 0, w - 1)];
      m = kMax ? std::max(m, v) : std::min(m, v);
    }
    out[x] = m;
  };
  int x = 0;
  for (; x < std::min(radius, w); ++x) scalar_one(x);
  for (; x + 32 + radius <= w; x += 32) {
    __m256i m = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + x - radius));
    for (int k = -radius + 1; k <= radius; ++k) {
      const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + x + k));
      m = kMax ? _mm256_max_epu8(m, v) : _mm256_min_epu8(m, v);
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + x), m);
  }
  for (; x < w; ++x) scalar_one(x);
}

template <bool kMax>
void col_minmax_u8_avx2(const uint8_t* in, int w, int h, int radius, uint8_t* out) {
  for (int y = 0; y < h; ++y) {
    uint8_t* orow = out + static_cast<size_t>(y) * w;
    int x = 0;
    for (; x + 32 <= w; x += 32) {
      __m256i m = kMax ? _mm256_setzero_si256() : _mm256_set1_epi8(static_cast<char>(0xFF));
      for (int k = -radius; k <= radius; ++k) {
        const int yy = std::clamp(y + k, 0, h - 1);
        const __m256i v = _mm256_loadu_si256(
            reinterpret_cast<const __m256i*>(in + static_cast<size_t>(yy) * w + x));
        m = kMax ? _mm256_max_epu8(m, v) : _mm256_min_epu8(m, v);
      }
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(orow + x), m);
    }
    for (; x < w; ++x) {
      uint8_t m = kMax ? 0 : 255;
      for (int k = -radius; k <= radius; ++k) {
        const int yy = std::clamp(y + k, 0, h - 1);
        const uint8_t v = in[static_cast<size_t>(yy) * w + x];
        m = kMax ? std::max(m, v) : std::min(m, v);
      }
      orow[x] = m;
    }
  }
}

// Exact u16 divide-by-9 via mulhi: floor(v*58255 / 2^19) == v/9 for v < 2304.
void box3x3_u8_avx2(const uint8_t* in, int w, int h, uint8_t* out) {
  if (w < 4 || h < 1) {
    scalar_ops().box3x3_u8(in, w, h, out);
    return;
  }
  std::vector<uint16_t> vsum(static_cast<size_t>(w));
  const __m256i magic = _mm256_set1_epi16(static_cast<short>(58255));
  const __m256i four = _mm256_set1_epi16(4);
  for (int y = 0; y < h; ++y) {
    const uint8_t* ra = in + static_cast<size_t>(std::clamp(y - 1, 0, h - 1)) * w;
    const uint8_t* rb = in + static_cast<size_t>(y) * w;
    const uint8_t* rc = in + static_cast<size_t>(std::clamp(y + 1, 0, h - 1)) * w;
    int x = 0;
    for (; x + 16 <= w; x += 16) {
      const __m256i a = _mm256_cvtepu8_epi16(
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(ra + x)));
      const __m256i b = _mm256_cvtepu8_epi16(
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(rb + x)));
      const __m256i c = _mm256_cvtepu8_epi16(
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(rc + x)));
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(vsum.data() + x),
                          _mm256_add_epi16(_mm256_add_epi16(a, b), c));
    }
    for (; x < w; ++x) {
      vsum[x] = static_cast<uint16_t>(ra[x] + rb[x] + rc[x]);
    }
    uint8_t* orow = out + static_cast<size_t>(y) * w;
    // x = 0 and the right border replicate horizontally.
    orow[0] = static_cast<uint8_t>((2 * vsum[0] + vsum[std::min(1, w - 1)] + 4) / 9);
    x = 1;
    for (; x + 16 + 1 <= w; x += 16) {
      const __m256i sl = _mm256_loadu_si256(
          reinterpret_cast<const __m256i*>(vsum.data() + x - 1));
      const __m256i sc = _mm256_loadu_si256(
          reinterpret_cast<const __m256i*>(vsum.data() + x));
      const __m256i sr = _mm256_loadu_si256(
          reinterpret_cast<const __m256i*>(vsum.data() + x + 1));
      const __m256i total =
          _mm256_add_epi16(_mm256_add_epi16(_mm256_add_epi16(sl, sc), sr), four);
      const __m256i q = _mm256_srli_epi16(_mm256_mulhi_epu16(total, magic), 3);
      const __m256i packed = _mm256_permute4x64_epi64(_mm256_packus_epi16(q, q), 0xD8);
      _mm_storeu_si128(reinterpret_cast<__m128i*>(orow + x),
                       _mm256_castsi256_si128(packed));
    }
    for (; x < w; ++x) {
      const int sum = vsum[x - 1] + vsum[x] + vsum[std::min(x + 1, w - 1)];
      orow[x] = static_cast<uint8_t>((sum + 4) / 9);
    }
  }
}

void offset_lightness_f32_avx2(const float* l, const int8_t* mask, float delta,
                               size_t n, float* out) {
  const __m256 d = _mm256_set1_ps(delta);
  const __m256 lo = _mm256_setzero_ps();
  const __m256 hi = _mm256_set1_ps(255.0f);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i m8 = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(mask + i));
    const __m256 m = _mm256_cvtepi32_ps(_mm256_cvtepi8_epi32(m8));
    const __m256 v = _mm256_add_ps(_mm256_loadu_ps(l + i), _mm256_mul_ps(d, m));
    _mm256_storeu_ps(out + i, _mm256_min_ps(_mm256_max_ps(v, lo), hi));
  }
  for (; i < n; ++i) {
    const float v = l[i] + delta * static_cast<float>(mask[i]);
    out[i] = std::min(std::max(v, 0.0f), 255.0f);
  }
}

}  // namespace

const Ops* avx2_ops() {
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  static const Ops ops = {
      srgb_to_l_u8_avx2,  sub_normalize_u8_avx2, sad_u8_avx2,
      threshold_u8_avx2,  row_minmax_u8_avx2<false>, row_minmax_u8_avx2<true>,
      col_minmax_u8_avx2<false>, col_minmax_u8_avx2<true>, box3x3_u8_avx2,
      offset_lightness_f32_avx2,
  };
  return &ops;
}

}  // namespace ipt::kernels

#else  // non-x86 builds fall back to the scalar table

namespace ipt::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace ipt::kernels

#endif
