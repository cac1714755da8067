#include "hyperspace/error.hpp"
#include "hyperspace/reduce.hpp"

namespace hyperspace {

DataList reduce_list(const DataList& data, const ReduceOptions& options) {
  if (data.empty()) throw DataError("reduce: empty data list");
  const DataMatrix stacked = stack(data);
  const auto counts = row_counts(data);

  switch (options.method) {
    case ReduceMethod::PCA: {
      const ReductionModel model = fit_pca(stacked, options.ndims);
      DataList out;
      for (const auto& m : data) out.push_back(transform(model, m));
      return out;
    }
    case ReduceMethod::PPCA: {
      const PpcaResult fit = fit_ppca(stacked, options.ndims, options.ppca);
      return split_rows(transform(fit.model, fit.completed), counts);
    }
    case ReduceMethod::MDS:
      return split_rows(fit_mds(stacked, options.ndims), counts);
    case ReduceMethod::ICA: {
      IcaOptions ica;
      ica.seed = options.seed;
      return split_rows(fit_ica(stacked, options.ndims, ica).sources, counts);
    }
    case ReduceMethod::TSNE: {
      TsneOptions tsne;
      tsne.seed = options.seed;
      tsne.perplexity = options.perplexity;
      tsne.iters = options.tsne_iters;
      return split_rows(fit_tsne(stacked, options.ndims, tsne).embedding, counts);
    }
  }
  throw UsageError("reduce: unsupported method");
}

}  // namespace hyperspace
