#pragma once

#include "lupi/common.hpp"
#include "lupi/distill.hpp"
#include "lupi/svm.hpp"
#include "lupi/svmplus.hpp"
#include "lupi/transfer.hpp"

#include <variant>

namespace lupi {

/// Any trained model the CLI and C API can hold, save and reload.
using AnyModel = std::variant<SvmModel, SvmPlusModel, KtModel, DistilledModel, FeedForwardNet>;

enum class ModelKind { svm, svmplus, kt, distill, net };

ModelKind model_kind(const AnyModel& model);
const char* model_kind_name(ModelKind kind);

Eigen::Index model_input_dim(const AnyModel& model);

/// Labels in the dataset encoding (-1/+1 binary, class index otherwise).
std::vector<int> model_predict_labels(const AnyModel& model, const Matrix& standard_rows);

/// Raw decision value per row: kernel-machine margin, or the class-1 minus
/// class-0 logit for binary nets. Throws for multiclass nets.
Vector model_decision_values(const AnyModel& model, const Matrix& standard_rows);

/// Key-value + array text format, full float precision. Distilled models
/// store both networks and the config; soft labels are a training artifact
/// and are not persisted.
std::string serialize_model(const AnyModel& model);
AnyModel parse_model(const std::string& text);

void save_model(const AnyModel& model, const std::string& path);
AnyModel load_model(const std::string& path);

}  // namespace lupi
