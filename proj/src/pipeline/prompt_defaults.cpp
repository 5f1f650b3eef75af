// Built-in prompt templates and demonstrations. Users can replace both from
// files; see TemplateStore::load_directory and DemoStore::load.

#include "chemreason/pipeline/prompts.h"

namespace chemreason {
namespace {

struct TemplateText {
  const char *id;
  const char *text;
};

constexpr TemplateText kTemplates[] = {
  { "mol_recognition.v1", R"(You will write the reasoning of a chemist who reads a structure drawing and converts it into SMILES.
Wrap the reasoning in <think></think> and the result in <answer><SMILES>...</SMILES></answer>.

Example of the expected style:
{{demos}}

For reference, the molecule in the drawing:
{{molecule}}

The correct SMILES is {{ground_truth}}. Reason as someone who only has the picture: describe what is drawn, assemble the structure fragment by fragment, and reach this SMILES at the end without stating it up front.)" },
  { "rxn_recognition.v1", R"(You will write the reasoning of a chemist who reads a reaction scheme and transcribes it as reaction SMILES (reactants>agents>products).
Wrap the reasoning in <think></think> and the result in <answer><SMILES>...</SMILES></answer>.

Example of the expected style:
{{demos}}

For reference, the species in the scheme.
Reactants: {{reactants}}
Agents: {{agents}}
Products: {{products}}

The correct reaction SMILES is {{ground_truth}}. Reason as someone who only has the picture: go through the scheme from left to right, identify each species from its drawing, and write the full reaction at the end.)" },
  { "rxn_prediction.v1", R"(You will write the reasoning of a chemist who looks at the starting materials and conditions of a reaction drawn in an image and predicts the product.
Wrap the reasoning in <think></think> and the result in <answer><SMILES>...</SMILES></answer>.

Example of the expected style:
{{demos}}

For reference, the species in the image.
Reactants: {{reactants}}
Agents: {{agents}}

The actual product is {{products}}. Do not reveal that you were told this. Reason from the drawing: name the reactive groups, decide which bonds form and break, and only then write the product SMILES.)" },
  { "mol_to_iupac.v1", R"(You will write the reasoning of a chemist who names the molecule drawn in an image.
Wrap the reasoning in <think></think> and the name in <answer><IUPAC>...</IUPAC></answer>.

Example of the expected style:
{{demos}}

For reference, the molecule in the drawing:
{{molecule}}

The correct name is {{ground_truth}}. Reason from the picture: find the parent chain or ring, number it, list the substituents, and assemble the name at the end.)" },
  { "caption.v1", R"(Describe the molecule drawn in an image in a short paragraph of plain prose, precise enough that a chemist could redraw it. Mention the ring systems, the chain lengths, the functional groups and how they are connected. Do not write any SMILES.

Example of the expected style:
{{demos}}

For reference, the molecule in the drawing:
{{molecule}})" },
  { "verifier.v1", R"({{instruction}}

Notes written by another chemist while looking at the image:
{{reasoning}}

Relying only on these notes, give the final answer as <answer><{{answer_tag}}>...</{{answer_tag}}></answer>.)" },
  { "caption_verifier.v1", R"(Here is a description of a molecule:
{{caption}}

Write the SMILES of the molecule described, as <answer><SMILES>...</SMILES></answer>.)" },
};

struct DemoText {
  const char *id;
  TaskKind task;
  const char *text;
};

constexpr DemoText kDemos[] = {
  { "mol_recognition-1", TaskKind::kMolRecognition,
    R"(<think>Looking at the image, I see a benzene ring carrying two substituents in a para relationship. One is a hydroxyl group drawn as OH. The other is a nitrogen bearing one hydrogen, attached to a carbonyl carbon that also carries a methyl group, so it is an acetamide. Putting the pieces together: CC(=O)N on one side of the ring and O on the opposite carbon.</think>
<answer><SMILES>CC(=O)Nc1ccc(O)cc1</SMILES></answer>)" },
  { "mol_recognition-2", TaskKind::kMolRecognition,
    R"(<think>The image depicts a six-membered saturated ring containing one nitrogen. The nitrogen is substituted with a methyl group. On the carbon opposite the nitrogen there is a carbonyl, drawn as a double bond to oxygen inside the ring position. So this is an N-methyl piperidinone with the ketone at position 4: CN1CCC(=O)CC1.</think>
<answer><SMILES>CN1CCC(=O)CC1</SMILES></answer>)" },
  { "mol_recognition-3", TaskKind::kMolRecognition,
    R"(<think>Analyzing the drawing, there are two fused aromatic rings. One is a benzene ring; the other is a five-membered ring with an NH at the fusion-adjacent position, which makes an indole. A short chain leaves the five-membered ring at position 3: two CH2 groups ending in an NH2. That is tryptamine: NCCc1c[nH]c2ccccc12.</think>
<answer><SMILES>NCCc1c[nH]c2ccccc12</SMILES></answer>)" },
  { "rxn_recognition-1", TaskKind::kRxnRecognition,
    R"(<think>In the image I see, on the left, a carboxylic acid attached to a benzene ring and methanol. Above the arrow the scheme shows sulfuric acid. On the right there is the methyl ester of the same aromatic acid. This is a Fischer esterification. Reactants: OC(=O)c1ccccc1 and CO; agent: OS(=O)(=O)O; product: COC(=O)c1ccccc1.</think>
<answer><SMILES>OC(=O)c1ccccc1.CO>OS(=O)(=O)O>COC(=O)c1ccccc1</SMILES></answer>)" },
  { "rxn_recognition-2", TaskKind::kRxnRecognition,
    R"(<think>The scheme depicts bromobenzene and phenylboronic acid as starting materials. The conditions drawn over the arrow are a palladium complex with triphenylphosphine ligands and potassium carbonate. The product on the right is biphenyl. Written out: Brc1ccccc1.OB(O)c1ccccc1 > catalyst and base > c1ccc(-c2ccccc2)cc1.</think>
<answer><SMILES>Brc1ccccc1.OB(O)c1ccccc1>O=C([O-])[O-].[K+].[K+]>c1ccc(-c2ccccc2)cc1</SMILES></answer>)" },
  { "rxn_recognition-3", TaskKind::kRxnRecognition,
    R"(<think>Reading the image from left to right: an amine, benzylamine, and an acyl chloride, acetyl chloride. Triethylamine is written above the arrow. The product drawn is N-benzylacetamide. So the reaction is NCc1ccccc1.CC(=O)Cl with CCN(CC)CC giving CC(=O)NCc1ccccc1.</think>
<answer><SMILES>NCc1ccccc1.CC(=O)Cl>CCN(CC)CC>CC(=O)NCc1ccccc1</SMILES></answer>)" },
  { "rxn_prediction-1", TaskKind::kRxnPrediction,
    R"(<think>The image shows a primary alcohol, 1-butanol, and the reagent drawn over the arrow is pyridinium chlorochromate in dichloromethane. PCC is a mild oxidant that stops at the aldehyde for primary alcohols. The CH2OH carbon becomes CHO while the rest of the chain is untouched, so the product is butanal.</think>
<answer><SMILES>CCCC=O</SMILES></answer>)" },
  { "rxn_prediction-2", TaskKind::kRxnPrediction,
    R"(<think>I see an aryl bromide, 4-bromoanisole, together with morpholine, and the conditions depict a palladium source, a bulky phosphine and sodium tert-butoxide. That combination points to a Buchwald-Hartwig amination: the C-Br bond is replaced by a C-N bond to the morpholine nitrogen. The methoxy group is unaffected.</think>
<answer><SMILES>COc1ccc(N2CCOCC2)cc1</SMILES></answer>)" },
  { "rxn_prediction-3", TaskKind::kRxnPrediction,
    R"(<think>Analyzing the image: a methyl ester of benzoic acid and aqueous sodium hydroxide, followed by acid workup. Hydroxide attacks the ester carbonyl and expels methoxide; after acidification the carboxylic acid is obtained. The aromatic ring stays as it is.</think>
<answer><SMILES>OC(=O)c1ccccc1</SMILES></answer>)" },
  { "mol_to_iupac-1", TaskKind::kMolToIupac,
    R"(<think>The image shows a four-carbon chain with a hydroxyl group on the second carbon. The longest chain containing the OH carbon has four carbons, so the parent is butane and the suffix is -ol. Numbering from the end closer to the OH puts it at position 2.</think>
<answer><IUPAC>butan-2-ol</IUPAC></answer>)" },
  { "mol_to_iupac-2", TaskKind::kMolToIupac,
    R"(<think>I see a benzene ring bearing a carboxylic acid and, on the adjacent carbon, an acetoxy group. The acid has priority, so the parent is benzoic acid with the carboxyl carbon attached at position 1. The ester substituent sits at position 2 and is named acetyloxy.</think>
<answer><IUPAC>2-acetyloxybenzoic acid</IUPAC></answer>)" },
  { "mol_to_iupac-3", TaskKind::kMolToIupac,
    R"(<think>The drawing depicts a six-membered carbocycle with a single double bond and a methyl group on one of the alkene carbons. The ring is the parent, cyclohexene, with the double bond between C1 and C2. Giving the methyl the lowest locant consistent with that places it on C1.</think>
<answer><IUPAC>1-methylcyclohexene</IUPAC></answer>)" },
  { "caption-1", TaskKind::kCaption,
    R"(The image shows ethyl acetate: an acetyl group whose carbonyl carbon is bonded to an oxygen that carries an ethyl chain. It contains a single ester functional group and no rings.)" },
  { "caption-2", TaskKind::kCaption,
    R"(Looking at the image, I see a benzene ring with a single substituent, a two-carbon chain that ends in a primary amine. The amine nitrogen is attached to the terminal CH2, two bonds away from the ring.)" },
  { "caption-3", TaskKind::kCaption,
    R"(Drawn in the image is cyclohexanone: a saturated six-membered carbon ring in which one ring carbon is a ketone carbonyl. There are no other substituents.)" },
};

}  // namespace

TemplateStore TemplateStore::defaults() {
  TemplateStore s;
  for (const TemplateText &t: kTemplates) {
    if (*t.text)
      s.add({ t.id, t.text });
  }
  return s;
}

DemoStore DemoStore::defaults() {
  DemoStore s;
  for (const DemoText &d: kDemos)
    s.add({ d.id, d.task, d.text });
  return s;
}

}  // namespace chemreason
