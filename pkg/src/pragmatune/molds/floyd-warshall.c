/* floyd-warshall: all-pairs shortest paths over an N-node graph.
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

#define N 500

static int path[N][N];

static double now_seconds(void) {
    struct timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return (double)ts.tv_sec + 1e-9 * (double)ts.tv_nsec;
}

int main(void) {
    int i, j, k;

    for (i = 0; i < N; i++)
        for (j = 0; j < N; j++) {
            path[i][j] = (i * j) % 7 + 1;
            if ((i + j) % 13 == 0 || (i + j) % 7 == 0 || (i + j) % 11 == 0)
                path[i][j] = 999;
        }

    double start = now_seconds();
#P0
#P1
#pragma clang loop(k,i,j) tile sizes(#P2,#P3,#P4) floor_ids(k1,i1,j1) tile_ids(k2,i2,j2)
#pragma clang loop id(k)
    for (k = 0; k < N; k++) {
#pragma clang loop id(i)
        for (i = 0; i < N; i++) {
#pragma clang loop id(j)
            for (j = 0; j < N; j++) {
                if (path[i][k] + path[k][j] < path[i][j])
                    path[i][j] = path[i][k] + path[k][j];
            }
        }
    }
    double elapsed = now_seconds() - start;

    printf("checksum %d\n", path[N - 1][0] + path[N / 2][N / 4]);
    printf("%.6f\n", elapsed);
    return 0;
}
