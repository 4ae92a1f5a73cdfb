/* Hot stride-2 filtering loops shared by the Cython binding.
 *
 * Two arithmetic orders:
 *   scalar  - one running accumulator, taps in ascending index order;
 *   vector  - 4-wide lane groups, pairwise horizontal reduction
 *             (acc2+acc3)+(acc0+acc1), remainder (if any) in scalar form.
 *
 * Build with -ffp-contract=off so float operations round exactly like the
 * NumPy fallback (no fused multiply-add).
 */
#ifndef WF_LINEKERNELS_H
#define WF_LINEKERNELS_H

#include <stddef.h>

#if defined(__SSE2__)
#include <emmintrin.h>
#define WF_HAVE_LANES 1
#else
#define WF_HAVE_LANES 0
#endif

static int wf_has_lane_isa(void) { return WF_HAVE_LANES; }

static void wf_analysis_scalar(const float *ext, long rows, long m, long k,
                               const float *lp, const float *hp,
                               float *lo, float *hi)
{
    long r, kk;
    int j;
    for (r = 0; r < rows; r++) {
        const float *row = ext + r * m;
        float *lor = lo + r * k;
        float *hir = hi + r * k;
        for (kk = 0; kk < k; kk++) {
            const float *w = row + 2 * kk;
            float alo = 0.0f, ahi = 0.0f;
            for (j = 0; j < 12; j++) {
                alo = alo + lp[j] * w[j];
                ahi = ahi + hp[j] * w[j];
            }
            lor[kk] = alo;
            hir[kk] = ahi;
        }
    }
}

#if WF_HAVE_LANES
/* One output at a time (used for block tails): lane accumulators then the
 * pairwise reduction (acc2+acc3)+(acc0+acc1). */
static inline void wf_vec_one(const float *w, const float *lp, const float *hp,
                              float *out_lo, float *out_hi)
{
    float llo[4], lhi[4];
    int lane, g;
    for (lane = 0; lane < 4; lane++) {
        float alo = lp[lane] * w[lane];
        float ahi = hp[lane] * w[lane];
        for (g = 1; g < 3; g++) {
            alo = alo + lp[4 * g + lane] * w[4 * g + lane];
            ahi = ahi + hp[4 * g + lane] * w[4 * g + lane];
        }
        llo[lane] = alo;
        lhi[lane] = ahi;
    }
    *out_lo = (llo[2] + llo[3]) + (llo[0] + llo[1]);
    *out_hi = (lhi[2] + lhi[3]) + (lhi[0] + lhi[1]);
}

/* Four outputs per iteration: row_j holds sample 2k+j of each output, so
 * the per-output lane/reduction DAG runs vertically across the SSE vector
 * and results stay bit-identical to the one-output form. */
static void wf_analysis_vector(const float *ext, long rows, long m, long k,
                               const float *lp, const float *hp,
                               float *lo, float *hi)
{
    long r, kk;
    long kblk = k & ~3L;
    int j;
    __m128 tl[12], th[12];
    for (j = 0; j < 12; j++) {
        tl[j] = _mm_set1_ps(lp[j]);
        th[j] = _mm_set1_ps(hp[j]);
    }
    for (r = 0; r < rows; r++) {
        const float *row = ext + r * m;
        float *lor = lo + r * k;
        float *hir = hi + r * k;
        for (kk = 0; kk < kblk; kk += 4) {
            const float *base = row + 2 * kk;
            __m128 rows_j[12];
            __m128 acc_lo[4], acc_hi[4], t0, t1;
            for (j = 0; j < 12; j++) {
                __m128 v0 = _mm_loadu_ps(base + j);
                __m128 v1 = _mm_loadu_ps(base + j + 4);
                rows_j[j] = _mm_shuffle_ps(v0, v1, _MM_SHUFFLE(2, 0, 2, 0));
            }
            for (j = 0; j < 4; j++) {
                acc_lo[j] = _mm_mul_ps(tl[j], rows_j[j]);
                acc_lo[j] = _mm_add_ps(acc_lo[j],
                                       _mm_mul_ps(tl[4 + j], rows_j[4 + j]));
                acc_lo[j] = _mm_add_ps(acc_lo[j],
                                       _mm_mul_ps(tl[8 + j], rows_j[8 + j]));
                acc_hi[j] = _mm_mul_ps(th[j], rows_j[j]);
                acc_hi[j] = _mm_add_ps(acc_hi[j],
                                       _mm_mul_ps(th[4 + j], rows_j[4 + j]));
                acc_hi[j] = _mm_add_ps(acc_hi[j],
                                       _mm_mul_ps(th[8 + j], rows_j[8 + j]));
            }
            t0 = _mm_add_ps(acc_lo[2], acc_lo[3]);
            t1 = _mm_add_ps(acc_lo[0], acc_lo[1]);
            _mm_storeu_ps(lor + kk, _mm_add_ps(t0, t1));
            t0 = _mm_add_ps(acc_hi[2], acc_hi[3]);
            t1 = _mm_add_ps(acc_hi[0], acc_hi[1]);
            _mm_storeu_ps(hir + kk, _mm_add_ps(t0, t1));
        }
        for (kk = kblk; kk < k; kk++)
            wf_vec_one(row + 2 * kk, lp, hp, lor + kk, hir + kk);
    }
}
#else
static void wf_analysis_vector(const float *ext, long rows, long m, long k,
                               const float *lp, const float *hp,
                               float *lo, float *hi)
{
    long r, kk;
    int lane, g;
    for (r = 0; r < rows; r++) {
        const float *row = ext + r * m;
        float *lor = lo + r * k;
        float *hir = hi + r * k;
        for (kk = 0; kk < k; kk++) {
            const float *w = row + 2 * kk;
            float llo[4], lhi[4];
            for (lane = 0; lane < 4; lane++) {
                float alo = lp[lane] * w[lane];
                float ahi = hp[lane] * w[lane];
                for (g = 1; g < 3; g++) {
                    alo = alo + lp[4 * g + lane] * w[4 * g + lane];
                    ahi = ahi + hp[4 * g + lane] * w[4 * g + lane];
                }
                llo[lane] = alo;
                lhi[lane] = ahi;
            }
            lor[kk] = (llo[2] + llo[3]) + (llo[0] + llo[1]);
            hir[kk] = (lhi[2] + lhi[3]) + (lhi[0] + lhi[1]);
        }
    }
}
#endif

/* synthesis: out[n] = sum over same-parity taps j (ascending) of
 * slp[j]*lo[t] + shp[j]*hi[t], t = (n + 12 - j) / 2. */
static void wf_synthesis_scalar(const float *loe, const float *hie,
                                long rows, long w,
                                const float *slp, const float *shp,
                                float *out)
{
    long r, n, outn = 2 * w - 12;
    int j;
    for (r = 0; r < rows; r++) {
        const float *lor = loe + r * w;
        const float *hir = hie + r * w;
        float *o = out + r * outn;
        for (n = 0; n < outn; n++) {
            int parity = (int)(n & 1);
            float acc = 0.0f;
            for (j = parity; j < 12; j += 2) {
                long t = (n + 12 - j) / 2;
                acc = acc + slp[j] * lor[t];
                acc = acc + shp[j] * hir[t];
            }
            o[n] = acc;
        }
    }
}

static void wf_synthesis_vector_one(const float *lor, const float *hir,
                                    const float *slp, const float *shp,
                                    long n, float *dst)
{
    int parity = (int)(n & 1);
    long m = (n - parity) / 2;
    float lanes[4];
    float acc, acch;
    int i;
    /* lane i uses tap j = parity + 2i, sample index m + 6 - i */
    for (i = 0; i < 4; i++)
        lanes[i] = slp[parity + 2 * i] * lor[m + 6 - i];
    acc = (lanes[2] + lanes[3]) + (lanes[0] + lanes[1]);
    for (i = 4; i < 6; i++)
        acc = acc + slp[parity + 2 * i] * lor[m + 6 - i];
    for (i = 0; i < 4; i++)
        lanes[i] = shp[parity + 2 * i] * hir[m + 6 - i];
    acch = (lanes[2] + lanes[3]) + (lanes[0] + lanes[1]);
    for (i = 4; i < 6; i++)
        acch = acch + shp[parity + 2 * i] * hir[m + 6 - i];
    *dst = acc + acch;
}

static void wf_synthesis_vector(const float *loe, const float *hie,
                                long rows, long w,
                                const float *slp, const float *shp,
                                float *out)
{
    long r, n, mm, outn = 2 * w - 12;
    long half = outn / 2;          /* outputs per parity */
    long mblk = half & ~3L;
    int i, parity;
    for (r = 0; r < rows; r++) {
        const float *lor = loe + r * w;
        const float *hir = hie + r * w;
        float *o = out + r * outn;
#if WF_HAVE_LANES
        for (mm = 0; mm < mblk; mm += 4) {
            __m128 res[2];
            for (parity = 0; parity < 2; parity++) {
                __m128 lanes[4], acc, acch, t0, t1;
                for (i = 0; i < 4; i++)
                    lanes[i] = _mm_mul_ps(_mm_set1_ps(slp[parity + 2 * i]),
                                          _mm_loadu_ps(lor + mm + 6 - i));
                t0 = _mm_add_ps(lanes[2], lanes[3]);
                t1 = _mm_add_ps(lanes[0], lanes[1]);
                acc = _mm_add_ps(t0, t1);
                for (i = 4; i < 6; i++)
                    acc = _mm_add_ps(acc,
                        _mm_mul_ps(_mm_set1_ps(slp[parity + 2 * i]),
                                   _mm_loadu_ps(lor + mm + 6 - i)));
                for (i = 0; i < 4; i++)
                    lanes[i] = _mm_mul_ps(_mm_set1_ps(shp[parity + 2 * i]),
                                          _mm_loadu_ps(hir + mm + 6 - i));
                t0 = _mm_add_ps(lanes[2], lanes[3]);
                t1 = _mm_add_ps(lanes[0], lanes[1]);
                acch = _mm_add_ps(t0, t1);
                for (i = 4; i < 6; i++)
                    acch = _mm_add_ps(acch,
                        _mm_mul_ps(_mm_set1_ps(shp[parity + 2 * i]),
                                   _mm_loadu_ps(hir + mm + 6 - i)));
                res[parity] = _mm_add_ps(acc, acch);
            }
            _mm_storeu_ps(o + 2 * mm, _mm_unpacklo_ps(res[0], res[1]));
            _mm_storeu_ps(o + 2 * mm + 4, _mm_unpackhi_ps(res[0], res[1]));
        }
        for (n = 2 * mblk; n < outn; n++)
            wf_synthesis_vector_one(lor, hir, slp, shp, n, o + n);
#else
        for (n = 0; n < outn; n++)
            wf_synthesis_vector_one(lor, hir, slp, shp, n, o + n);
#endif
    }
}

#endif /* WF_LINEKERNELS_H */
