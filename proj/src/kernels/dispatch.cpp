#include <atomic>
#include <cstdlib>
#include <string>

#include "mtc/error.hpp"
#include "tables.hpp"

namespace mtc::kernels {
namespace {

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(MTC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* lookup(Isa isa) {
    if (!cpu_supports(isa)) return nullptr;
    switch (isa) {
        case Isa::scalar:
            return &detail::scalar_table;
        case Isa::avx2:
#ifdef MTC_HAVE_AVX2
            return &detail::avx2_table;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable* select_initial() {
    if (const char* env = std::getenv("MTC_ISA")) {
        const std::string want(env);
        if (want == "scalar") return &detail::scalar_table;
        if (want == "avx2") {
            if (const auto* t = lookup(Isa::avx2)) return t;
        }
    }
    if (const auto* t = lookup(Isa::avx2)) return t;
    return &detail::scalar_table;
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{select_initial()};
    return current;
}

}  // namespace

const KernelTable& table(Isa isa) {
    const auto* t = lookup(isa);
    if (t == nullptr) {
        throw InvalidArgument("kernel ISA '" + std::string(name(isa)) + "' is not available on this machine");
    }
    return *t;
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { slot().store(&table(isa), std::memory_order_release); }

std::vector<Isa> available() {
    std::vector<Isa> out{Isa::scalar};
    if (lookup(Isa::avx2) != nullptr) out.push_back(Isa::avx2);
    return out;
}

std::string_view name(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
    }
    return "unknown";
}

}  // namespace mtc::kernels
