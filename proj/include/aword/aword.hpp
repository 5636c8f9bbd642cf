#pragma once

#include "aword/codebook.hpp"
#include "aword/embedding.hpp"
#include "aword/encoding.hpp"
#include "aword/error.hpp"
#include "aword/features.hpp"
#include "aword/flow.hpp"
#include "aword/fusion.hpp"
#include "aword/io/atomic_file.hpp"
#include "aword/io/blob.hpp"
#include "aword/io/checkpoint.hpp"
#include "aword/io/codebook_io.hpp"
#include "aword/io/encoded_io.hpp"
#include "aword/io/flow_io.hpp"
#include "aword/io/manifest.hpp"
#include "aword/io/report.hpp"
#include "aword/io/table_io.hpp"
#include "aword/models/clstm.hpp"
#include "aword/models/predict.hpp"
#include "aword/models/synth.hpp"
#include "aword/models/tcnn.hpp"
#include "aword/models/train.hpp"
#include "aword/nn/activations.hpp"
#include "aword/nn/conv1d.hpp"
#include "aword/nn/dense.hpp"
#include "aword/nn/dropout.hpp"
#include "aword/nn/lstm.hpp"
#include "aword/nn/params.hpp"
#include "aword/nn/pooling.hpp"
#include "aword/nn/rmsprop.hpp"
#include "aword/parallel.hpp"
#include "aword/pca.hpp"
#include "aword/rng.hpp"
#include "aword/types.hpp"
