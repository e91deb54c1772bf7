#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coarsehall/geometry.hpp"
#include "coarsehall/operators.hpp"
#include "coarsehall/pairing.hpp"
#include "coarsehall/partitions.hpp"

namespace coarsehall {

/// FNV-1a 64-bit; used to fingerprint configs and clouds.
std::uint64_t fnv1a_hash(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

std::uint64_t cloud_hash(const SiteCloud& cloud);

std::string cloud_to_json(const SiteCloud& cloud);
CloudPtr cloud_from_json(const std::string& json_text);

std::string mask_to_json(const RegionMask& mask);
std::string partition_to_json(const QPartition& p);

std::string pairing_to_json(const PairingResult& r);

std::string operator_to_json(const SiteOperator& l);
SiteOperator operator_from_json(const std::string& json_text, const CloudPtr& cloud);

/// Fixed-format numeric cell used in CSV output; keeps reruns byte-identical.
std::string format_number(double v);

/// One CSV line from already-formatted cells.
std::string csv_row(const std::vector<std::string>& cells);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace coarsehall
