#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gazkit/gaz_embedding.hpp"
#include "gazkit/train.hpp"

namespace gazkit {

// Versioned JSON blobs. Matrices are stored row-major with their shape;
// doubles round-trip exactly.
void save_gaz_params(const GazEmbeddingParams& params, const std::vector<std::string>& type_names, std::ostream& out);
// When `expected_types` is non-null the stored type names must equal it.
GazEmbeddingParams load_gaz_params(std::istream& in, const std::vector<std::string>* expected_types = nullptr);

void save_tagger(const TrainedTagger& tagger, std::ostream& out);
TrainedTagger load_tagger(std::istream& in);
void save_tagger_file(const TrainedTagger& tagger, const std::string& path);
TrainedTagger load_tagger_file(const std::string& path);

}  // namespace gazkit
