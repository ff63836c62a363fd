/* covariance: cov[i][j] of N data points with M attributes each.
 *
 * Code mold: each parameter token (a '#' directly followed by the
 * parameter name) is replaced by the tuner before compilation.  The tunable sites on this kernel are a representative
 * reconstruction; the normative fact is the benchmark's configuration
 * count, not these exact insertion points.  The program prints a checksum
 * line and then the kernel's elapsed seconds as the last stdout line.
 */
#define _POSIX_C_SOURCE 199309L
#include <stdio.h>
#include <time.h>

#define M 1200
#define NPTS 1400

static double data[NPTS][M], cov[M][M], mean[M];

static double now_seconds(void) {
    struct timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return (double)ts.tv_sec + 1e-9 * (double)ts.tv_nsec;
}

int main(void) {
    int i, j, k;

    for (i = 0; i < NPTS; i++)
        for (j = 0; j < M; j++)
            data[i][j] = (double)((i * j + 11) % NPTS) / M;

    double start = now_seconds();
    for (j = 0; j < M; j++) {
        mean[j] = 0.0;
        for (i = 0; i < NPTS; i++)
            mean[j] += data[i][j];
        mean[j] /= (double)NPTS;
    }
    for (i = 0; i < NPTS; i++)
        for (j = 0; j < M; j++)
            data[i][j] -= mean[j];
#P0
#P1
#pragma clang loop(i,j,k) tile sizes(#P2,#P3,#P4) floor_ids(i1,j1,k1) tile_ids(i2,j2,k2)
#pragma clang loop id(i)
    for (i = 0; i < M; i++) {
#pragma clang loop id(j)
        for (j = i; j < M; j++) {
            cov[i][j] = 0.0;
#pragma clang loop id(k)
            for (k = 0; k < NPTS; k++)
                cov[i][j] += data[k][i] * data[k][j];
            cov[i][j] /= (double)(NPTS - 1);
            cov[j][i] = cov[i][j];
        }
    }
    double elapsed = now_seconds() - start;

    printf("checksum %.6f\n", cov[0][0] + cov[M / 2][M / 3]);
    printf("%.6f\n", elapsed);
    return 0;
}
