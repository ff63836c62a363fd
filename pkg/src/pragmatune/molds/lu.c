/* lu: in-place LU decomposition without pivoting, A = L*U.
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

#define N 2000

static double A[N][N];

static double now_seconds(void) {
    struct timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return (double)ts.tv_sec + 1e-9 * (double)ts.tv_nsec;
}

int main(void) {
    int i, j, k;

    /* diagonally dominant initialization keeps the factorization stable */
    for (i = 0; i < N; i++) {
        for (j = 0; j < N; j++)
            A[i][j] = (double)((i * (j + 1) + 7) % N) / N - 0.5;
        A[i][i] += (double)N;
    }

    double start = now_seconds();
#P0
#P1
#pragma clang loop(k,i,j) tile sizes(#P2,#P3,#P4) floor_ids(k1,i1,j1) tile_ids(k2,i2,j2)
#pragma clang loop id(k)
    for (k = 0; k < N; k++) {
#pragma clang loop id(i)
        for (i = k + 1; i < N; i++) {
            A[i][k] /= A[k][k];
#pragma clang loop id(j)
            for (j = k + 1; j < N; j++)
                A[i][j] -= A[i][k] * A[k][j];
        }
    }
    double elapsed = now_seconds() - start;

    printf("checksum %.6f\n", A[N - 1][N - 1] + A[N / 2][N / 3]);
    printf("%.6f\n", elapsed);
    return 0;
}
