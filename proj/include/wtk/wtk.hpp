// wtk.hpp - umbrella header
#pragma once

#include "wtk/agreement.hpp"
#include "wtk/annotation.hpp"
#include "wtk/bundle.hpp"
#include "wtk/diff.hpp"
#include "wtk/error.hpp"
#include "wtk/playback.hpp"
#include "wtk/segment.hpp"
#include "wtk/session.hpp"
#include "wtk/stats.hpp"
#include "wtk/taxonomy.hpp"
#include "wtk/unicode.hpp"
