/* Miniature mold for the synthetic test problem.
 *
 * Never compiled during normal use: the owning problem binds a mock
 * objective, so the tuner sees this file only as token-bearing text.
 */
#include <stdio.h>

int main(void) {
    double acc = 0.0;
#P0
#P1
#pragma clang loop unroll factor(#P2)
    for (int i = 0; i < 1000 * #P3; i++)
        acc += (double)i * 1e-6;
    printf("%.6f\n", acc);
    return 0;
}
