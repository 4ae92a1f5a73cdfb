# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled bindings for the stride-2 filtering kernels."""

import numpy as np

cdef extern from "_linekernels.h":
    int wf_has_lane_isa() nogil
    void wf_analysis_scalar(const float *ext, long rows, long m, long k,
                            const float *lp, const float *hp,
                            float *lo, float *hi) nogil
    void wf_analysis_vector(const float *ext, long rows, long m, long k,
                            const float *lp, const float *hp,
                            float *lo, float *hi) nogil
    void wf_synthesis_scalar(const float *loe, const float *hie,
                             long rows, long w,
                             const float *slp, const float *shp,
                             float *out) nogil
    void wf_synthesis_vector(const float *loe, const float *hie,
                             long rows, long w,
                             const float *slp, const float *shp,
                             float *out) nogil


def has_lane_isa():
    return wf_has_lane_isa()


def analysis_plane(float[:, ::1] ext, float[::1] lp, float[::1] hp, int vector):
    cdef long rows = ext.shape[0]
    cdef long m = ext.shape[1]
    cdef long k = (m - 12) // 2
    lo_arr = np.empty((rows, k), dtype=np.float32)
    hi_arr = np.empty((rows, k), dtype=np.float32)
    cdef float[:, ::1] lo = lo_arr
    cdef float[:, ::1] hi = hi_arr
    if rows == 0 or k == 0:
        return lo_arr, hi_arr
    with nogil:
        if vector:
            wf_analysis_vector(&ext[0, 0], rows, m, k, &lp[0], &hp[0],
                               &lo[0, 0], &hi[0, 0])
        else:
            wf_analysis_scalar(&ext[0, 0], rows, m, k, &lp[0], &hp[0],
                               &lo[0, 0], &hi[0, 0])
    return lo_arr, hi_arr


def synthesis_plane(float[:, ::1] lo_ext, float[:, ::1] hi_ext,
                    float[::1] slp, float[::1] shp, int vector):
    cdef long rows = lo_ext.shape[0]
    cdef long w = lo_ext.shape[1]
    cdef long outn = 2 * w - 12
    out_arr = np.empty((rows, outn), dtype=np.float32)
    cdef float[:, ::1] out = out_arr
    if rows == 0 or outn <= 0:
        return out_arr
    with nogil:
        if vector:
            wf_synthesis_vector(&lo_ext[0, 0], &hi_ext[0, 0], rows, w,
                                &slp[0], &shp[0], &out[0, 0])
        else:
            wf_synthesis_scalar(&lo_ext[0, 0], &hi_ext[0, 0], rows, w,
                                &slp[0], &shp[0], &out[0, 0])
    return out_arr
