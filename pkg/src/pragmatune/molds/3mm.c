/* 3mm: G = (A*B) * (C*D) via E = A*B, F = C*D, G = E*F.
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

#define NP 800
#define NQ 900
#define NR 1000
#define NS 1100
#define NT 1200

static double A[NP][NQ], B[NQ][NR], C[NR][NS], D[NS][NT];
static double E[NP][NR], F[NR][NT], G[NP][NT];

static double now_seconds(void) {
    struct timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return (double)ts.tv_sec + 1e-9 * (double)ts.tv_nsec;
}

int main(void) {
    int i, j, k, l, m, n, p, q, r;

    for (i = 0; i < NP; i++)
        for (j = 0; j < NQ; j++)
            A[i][j] = (double)((i * j + 1) % NP) / (5 * NP);
    for (i = 0; i < NQ; i++)
        for (j = 0; j < NR; j++)
            B[i][j] = (double)((i * (j + 1) + 2) % NQ) / (5 * NQ);
    for (i = 0; i < NR; i++)
        for (j = 0; j < NS; j++)
            C[i][j] = (double)(i * (j + 3) % NR) / (5 * NR);
    for (i = 0; i < NS; i++)
        for (j = 0; j < NT; j++)
            D[i][j] = (double)((i * (j + 2) + 2) % NS) / (5 * NS);

    double start = now_seconds();
#P0
#P1
#P7
#pragma clang loop(i,j,k) tile sizes(#P4,#P5,#P6) floor_ids(i1,j1,k1) tile_ids(i2,j2,k2)
#pragma clang loop id(i)
    for (i = 0; i < NP; i++) {
#pragma clang loop id(j)
        for (j = 0; j < NR; j++) {
            E[i][j] = 0.0;
#pragma clang loop id(k)
            for (k = 0; k < NQ; k++)
                E[i][j] += A[i][k] * B[k][j];
        }
    }
#P2
#P3
#P8
#pragma clang loop id(l)
    for (l = 0; l < NR; l++) {
#pragma clang loop id(m)
        for (m = 0; m < NT; m++) {
            F[l][m] = 0.0;
#pragma clang loop id(n)
            for (n = 0; n < NS; n++)
                F[l][m] += C[l][n] * D[n][m];
        }
    }
#P9
#pragma clang loop id(p)
    for (p = 0; p < NP; p++) {
#pragma clang loop id(q)
        for (q = 0; q < NT; q++) {
            G[p][q] = 0.0;
#pragma clang loop id(r)
            for (r = 0; r < NR; r++)
                G[p][q] += E[p][r] * F[r][q];
        }
    }
    double elapsed = now_seconds() - start;

    printf("checksum %.6f\n", G[NP - 1][0] + G[NP / 2][NT / 4]);
    printf("%.6f\n", elapsed);
    return 0;
}
