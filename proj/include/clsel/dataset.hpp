#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace clsel {

// Independent d-dimensional observations, one per row. The optional group
// vector carries the binary case/control label used by the ordinal model.
struct Dataset {
  Eigen::MatrixXd observations;  // n x d
  std::optional<Eigen::VectorXi> group;
  std::vector<std::string> column_names;  // empty => x1..xd on write

  int n() const { return static_cast<int>(observations.rows()); }
  int d() const { return static_cast<int>(observations.cols()); }

  // n >= 2, no missing/non-finite entries; with ordinal=true additionally
  // requires entries in {0,1,2} and a group column of 0/1 labels.
  void validate(bool ordinal = false) const;
};

// CSV with a header row; an optional final column named "group" holds the
// binary labels. Values are written in shortest round-trip form.
Dataset read_dataset_csv(const std::string& path);
std::string dataset_to_csv(const Dataset& data);
void write_dataset_csv(const std::string& path, const Dataset& data);

}  // namespace clsel
