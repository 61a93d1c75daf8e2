#pragma once

namespace artdesc::retriever::resources {

extern const char* const kStopWords;
extern const char* const kBlocklist;

}  // namespace artdesc::retriever::resources
