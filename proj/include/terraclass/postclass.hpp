#pragma once

#include "terraclass/raster_io.hpp"

#include <filesystem>
#include <map>
#include <utility>
#include <vector>

namespace terraclass {

/// Recode table for merging classes. Targets not in the input legend must
/// be declared with a name and color.
struct Recode {
    std::map<ClassId, ClassId> mapping;
    std::vector<LegendEntry> fresh_targets;
};

/// CSV `old_id,new_id[,name,r,g,b]`; the optional columns declare a fresh target.
Recode read_recode(const std::filesystem::path& path);

/// Merges classes; sources recoded away (and not targeted) leave the legend.
std::pair<ClassRaster, ClassLegend> merge_classes(const ClassRaster& cr, const ClassLegend& legend,
                                                  const Recode& recode);

/// Modal filter over a clipped square window. Ties keep the center value.
ClassRaster majority_filter(const ClassRaster& cr, int window);

} // namespace terraclass
