// Uniform prediction-function abstraction: built-in analytic models, CSV
// prediction tables, and external model processes speaking newline-delimited
// JSON over standard streams.

#pragma once

#include <chrono>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "jshap/rational.hpp"

namespace jshap {

class ModelHandle {
 public:
  virtual ~ModelHandle() = default;

  // Minimum feature count the model needs; 0 means any width.
  virtual int n_features() const = 0;
  virtual bool parallel_safe() const = 0;
  virtual bool exact_capable() const { return false; }
  virtual std::string describe() const = 0;

  virtual double predict(std::span<const double> instance) const = 0;
  double predict(std::initializer_list<double> instance) const {
    return predict(std::span<const double>(instance.begin(), instance.size()));
  }
  // Default loops over predict; the external handle pipelines instead.
  virtual void predict_batch(std::span<const std::vector<double>> instances,
                             std::span<double> out) const;
  // Exact analytic evaluation; only built-in models support it.
  virtual Rational predict_exact(std::span<const Rational> instance) const;
};

using ModelPtr = std::shared_ptr<ModelHandle>;

namespace models {
ModelPtr select(int i);
ModelPtr sum(int i, int j);
ModelPtr diff(int i, int j);
ModelPtr product(int i, int j);
ModelPtr constant(const Rational& c);
ModelPtr linear(std::vector<Rational> weights);
}  // namespace models

// Dispatch by expression name with string params, e.g. ("sum", {"0","1"}).
ModelPtr builtin_model(const std::string& expr, const std::vector<std::string>& params);

// CSV whose final column is the prediction and whose other columns are the
// feature values; lookups must hit a listed row exactly.
ModelPtr table_model(const std::string& csv_path);

// Spawns `command` through the shell. Requests and responses are one JSON
// object per line: {"id":u64,"instance":[f64,...]} up,
// {"id":u64,"prediction":f64} down; responses may arrive out of order.
// Calls are serialized (single reader/writer); predict_batch pipelines ids.
ModelPtr external_model(const std::string& command,
                        std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));

// "builtin:sum:0,1", "builtin:linear:0.5,-1/3,2", "table:preds.csv",
// "exec:python3 model.py --flag".
ModelPtr parse_model_spec(const std::string& spec);

}  // namespace jshap
