#pragma once

// Umbrella header: the whole toolkit.

#include "tourmon/csv.hpp"
#include "tourmon/currency.hpp"
#include "tourmon/date.hpp"
#include "tourmon/error.hpp"
#include "tourmon/extract.hpp"
#include "tourmon/fetch.hpp"
#include "tourmon/geo.hpp"
#include "tourmon/html.hpp"
#include "tourmon/lexicon.hpp"
#include "tourmon/pipeline.hpp"
#include "tourmon/record.hpp"
#include "tourmon/rng.hpp"
#include "tourmon/rules.hpp"
#include "tourmon/sentiment.hpp"
#include "tourmon/sha256.hpp"
#include "tourmon/snapshot.hpp"
#include "tourmon/stats.hpp"
#include "tourmon/textproc.hpp"
#include "tourmon/utf8.hpp"
#include "tourmon/version.hpp"
