#ifndef CHEMREASON_TASK_H_
#define CHEMREASON_TASK_H_

#include <string_view>

#include "chemreason/extraction.h"

namespace chemreason {

enum class TaskKind {
  kMolRecognition,
  kRxnRecognition,
  kRxnPrediction,
  kMolToIupac,
  kCaption,
};

std::string_view task_kind_name(TaskKind task);
// Throws Error(kInvalidRecord) on unknown names.
TaskKind parse_task_kind(std::string_view name);

// What a model is expected to answer with; kNone for free-text captions.
AnswerKind answer_kind_for(TaskKind task);

}  // namespace chemreason

#endif  // CHEMREASON_TASK_H_
