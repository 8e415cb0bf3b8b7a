#pragma once

// Everything, including the HTTP service (pulls in cpp-httplib) and the CLI
// front end (pulls in CLI11).
#include "threadlens/classify.hpp"
#include "threadlens/cli.hpp"
#include "threadlens/config.hpp"
#include "threadlens/corpus.hpp"
#include "threadlens/csv.hpp"
#include "threadlens/dashboard.hpp"
#include "threadlens/engine.hpp"
#include "threadlens/error.hpp"
#include "threadlens/evaluate.hpp"
#include "threadlens/features.hpp"
#include "threadlens/json_io.hpp"
#include "threadlens/label.hpp"
#include "threadlens/model_io.hpp"
#include "threadlens/service.hpp"
#include "threadlens/store.hpp"
#include "threadlens/textprep.hpp"
#include "threadlens/timeutil.hpp"
