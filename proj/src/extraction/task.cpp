#include "chemreason/task.h"

#include <fmt/format.h>

#include "chemreason/error.h"

namespace chemreason {

std::string_view task_kind_name(TaskKind task) {
  switch (task) {
  case TaskKind::kMolRecognition: return "mol_recognition";
  case TaskKind::kRxnRecognition: return "rxn_recognition";
  case TaskKind::kRxnPrediction: return "rxn_prediction";
  case TaskKind::kMolToIupac: return "mol_to_iupac";
  case TaskKind::kCaption: return "caption";
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  for (TaskKind t: { TaskKind::kMolRecognition, TaskKind::kRxnRecognition,
                     TaskKind::kRxnPrediction, TaskKind::kMolToIupac,
                     TaskKind::kCaption }) {
    if (task_kind_name(t) == name)
      return t;
  }
  throw Error(ErrorCode::kInvalidRecord, fmt::format("unknown task '{}'", name));
}

AnswerKind answer_kind_for(TaskKind task) {
  switch (task) {
  case TaskKind::kMolToIupac: return AnswerKind::kIupac;
  case TaskKind::kCaption: return AnswerKind::kNone;
  default: return AnswerKind::kSmiles;
  }
}

}  // namespace chemreason
