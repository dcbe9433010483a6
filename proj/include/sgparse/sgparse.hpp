#pragma once

#include "sgparse/alignment.hpp"
#include "sgparse/corpus.hpp"
#include "sgparse/edge_centric.hpp"
#include "sgparse/errors.hpp"
#include "sgparse/lexicon.hpp"
#include "sgparse/nn/checkpoint.hpp"
#include "sgparse/nn/gradcheck.hpp"
#include "sgparse/nn/model.hpp"
#include "sgparse/nn/trainer.hpp"
#include "sgparse/pipeline.hpp"
#include "sgparse/retrieval.hpp"
#include "sgparse/scene_graph.hpp"
#include "sgparse/spice.hpp"
#include "sgparse/text.hpp"
#include "sgparse/transition.hpp"
