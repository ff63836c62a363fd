/* heat-3d: 3-D heat-equation stencil, alternating A->B and B->A sweeps.
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

#define N 120
#define TSTEPS 500

static double A[N][N][N], B[N][N][N];

static double now_seconds(void) {
    struct timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return (double)ts.tv_sec + 1e-9 * (double)ts.tv_nsec;
}

int main(void) {
    int t, i, j, k;

    for (i = 0; i < N; i++)
        for (j = 0; j < N; j++)
            for (k = 0; k < N; k++)
                A[i][j][k] = B[i][j][k] = (double)(i + j + (N - k)) * 10.0 / N;

    double start = now_seconds();
    for (t = 1; t <= TSTEPS; t++) {
#P0
#P1
#P2
#pragma clang loop(i,j,k) tile sizes(#P3,#P4,#P5) floor_ids(i1,j1,k1) tile_ids(i2,j2,k2)
#pragma clang loop id(i)
        for (i = 1; i < N - 1; i++) {
#pragma clang loop id(j)
            for (j = 1; j < N - 1; j++) {
#pragma clang loop id(k)
                for (k = 1; k < N - 1; k++) {
                    B[i][j][k] = 0.125 * (A[i + 1][j][k] - 2.0 * A[i][j][k] + A[i - 1][j][k])
                               + 0.125 * (A[i][j + 1][k] - 2.0 * A[i][j][k] + A[i][j - 1][k])
                               + 0.125 * (A[i][j][k + 1] - 2.0 * A[i][j][k] + A[i][j][k - 1])
                               + A[i][j][k];
                }
            }
        }
        for (i = 1; i < N - 1; i++)
            for (j = 1; j < N - 1; j++)
                for (k = 1; k < N - 1; k++) {
                    A[i][j][k] = 0.125 * (B[i + 1][j][k] - 2.0 * B[i][j][k] + B[i - 1][j][k])
                               + 0.125 * (B[i][j + 1][k] - 2.0 * B[i][j][k] + B[i][j - 1][k])
                               + 0.125 * (B[i][j][k + 1] - 2.0 * B[i][j][k] + B[i][j][k - 1])
                               + B[i][j][k];
                }
    }
    double elapsed = now_seconds() - start;

    printf("checksum %.6f\n", A[N / 2][N / 2][N / 2] + B[N / 4][N / 4][N / 4]);
    printf("%.6f\n", elapsed);
    return 0;
}
