#include "mlsde/schemes.hpp"

namespace mlsde {

std::string to_string(SchemeKind kind) { return kind == SchemeKind::NV ? "nv" : "gs"; }

std::string to_string(LevelCoupling coupling) {
    switch (coupling) {
        case LevelCoupling::Gs: return "gs";
        case LevelCoupling::Nv: return "nv";
        case LevelCoupling::GsNv: return "gs-nv";
        case LevelCoupling::Level0Gs: return "level0-gs";
        case LevelCoupling::Level0NvSingle: return "level0-nv-single";
        case LevelCoupling::Level0NvAveraged: return "level0-nv-averaged";
    }
    return "unknown";
}

EvalCounts eval_counts(LevelCoupling coupling) {
    switch (coupling) {
        case LevelCoupling::Gs: return {2, 1};
        case LevelCoupling::Nv: return {4, 2};
        case LevelCoupling::GsNv: return {4, 1};
        case LevelCoupling::Level0Gs: return {1, 0};
        case LevelCoupling::Level0NvSingle: return {1, 0};
        case LevelCoupling::Level0NvAveraged: return {2, 0};
    }
    return {};
}

}  // namespace mlsde
