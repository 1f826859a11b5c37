#pragma once

#include "posebench/chem/elements.hpp"
#include "posebench/chem/manifest.hpp"
#include "posebench/chem/protein_io.hpp"
#include "posebench/chem/sdf.hpp"
#include "posebench/chem/structure.hpp"
#include "posebench/error.hpp"
#include "posebench/geom/kabsch.hpp"
#include "posebench/geom/metrics.hpp"
#include "posebench/harness/compare.hpp"
#include "posebench/harness/config.hpp"
#include "posebench/harness/pose_metrics.hpp"
#include "posebench/harness/report.hpp"
#include "posebench/harness/runner.hpp"
#include "posebench/harness/stratify.hpp"
#include "posebench/molgraph/fingerprint.hpp"
#include "posebench/molgraph/graph.hpp"
#include "posebench/molgraph/isomorphism.hpp"
#include "posebench/molgraph/rings.hpp"
#include "posebench/molgraph/stereo.hpp"
#include "posebench/pocketsel/pocket.hpp"
#include "posebench/stats/best_at_k.hpp"
#include "posebench/stats/bootstrap.hpp"
#include "posebench/stats/significance.hpp"
#include "posebench/validity/checks.hpp"
