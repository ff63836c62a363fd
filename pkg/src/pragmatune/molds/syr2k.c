/* syr2k: symmetric rank-2k update, C += alpha*(A*B^T + B*A^T), lower triangle.
 *
 * Code mold: each parameter token (a '#' directly followed by the
 * parameter name) is replaced by the tuner before compilation.  The program prints a checksum line and then the kernel's
 * elapsed seconds as the last line of standard output.
 */
#define _POSIX_C_SOURCE 199309L
#include <stdio.h>
#include <time.h>

#define N 1200
#define M 1000

static double A[N][M], B[N][M], C[N][N];

static double now_seconds(void) {
    struct timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return (double)ts.tv_sec + 1e-9 * (double)ts.tv_nsec;
}

int main(void) {
    double alpha = 1.5, beta = 1.2;
    int i, j, k;

    for (i = 0; i < N; i++)
        for (j = 0; j < M; j++) {
            A[i][j] = (double)((i * j + 1) % N) / N;
            B[i][j] = (double)((i * j + 2) % M) / M;
        }
    for (i = 0; i < N; i++)
        for (j = 0; j < N; j++)
            C[i][j] = (double)((i * j + 3) % N) / M;

    double start = now_seconds();
    for (i = 0; i < N; i++)
        for (j = 0; j <= i; j++)
            C[i][j] *= beta;
#P0
#P1
#P2
#pragma clang loop(i,j,k) tile sizes(#P3,#P4,#P5) floor_ids(i1,j1,k1) tile_ids(i2,j2,k2)
#pragma clang loop id(i)
    for (i = 0; i < N; i++) {
#pragma clang loop id(j)
        for (j = 0; j < M; j++) {
#pragma clang loop id(k)
            for (k = 0; k <= i; k++) {
                C[i][k] += A[k][j] * alpha * B[i][j] + B[k][j] * alpha * A[i][j];
            }
        }
    }
    double elapsed = now_seconds() - start;

    printf("checksum %.6f\n", C[N - 1][0] + C[N / 2][N / 4]);
    printf("%.6f\n", elapsed);
    return 0;
}
