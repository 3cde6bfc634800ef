#include "wginv/rng.hpp"

namespace wginv {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) {
    Rng mix(master ^ (0x5851f42d4c957f2dULL * (stream + 1)));
    std::uint64_t a = mix.next_u64();
    Rng mix2(a ^ (0x14057b7ef767814fULL * (index + 1)));
    return mix2.next_u64();
}

}  // namespace wginv
