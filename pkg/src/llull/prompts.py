"""Prompt templates shipped with the pipeline.

Placeholders use {name} markers and are filled with str.replace, never
str.format, because the templates contain literal JSON braces. Templates are
byte-stable: tests pin golden renderings against them.
"""

EXTRACTION_PROMPT = """You are a helpful assistant who annotates the paper with its title and the abstract:

Please annotate the paper with the following information:

1. The themes of the paper (As, e.g., few-shot, long-tail, less is more, in-the-wild, self-refine, look-ahead, hindsight, memory, self-, rethink, weak to strong, granularity, in-context learning, reference free, grokking, self-evolve, long-tail, compositionality, multi-hop, modular, etc.)
2. The domains of the paper (Bs, e.g., question answering, argument mining, planning, RAG, calibration, reasoning, safety, debate, memorization, automated research, etc.)
3. The method insights of the paper, especially novel architecture (Cs, e.g., Mamba, RWKV, LLMs, Self-attention, LLMs, etc.)
4. The templates of the paper title/abstract (templates, e.g., Comparing C1 and C2 in B1 with A1, etc.)

Requirements:
1. There can be multiple A, B, C, and one Template.
2. Use generic keywords of A, B, C, and Template to allow reuse, instead of specific ones for each paper.
3. Make sure keywords are exclusive among A, B, C.

Please output the annotation in the following JSON format:

{"A": ["few-shot", "long-tail"], "B": ["argument mining"], "C": ["Mamba"], "Template": ["Comparing C1 and C2 in B1 with A1"]}

An Example:
Title: Thrust: Adaptively Propels Large Language Models with External Knowledge

Abstract: Although large-scale pre-trained language models (PTLMs) are shown to encode rich knowledge in their model parameters, the inherent knowledge in PTLMs can be opaque or static, making external knowledge necessary. However, the existing information retrieval techniques could be costly and may even introduce noisy and sometimes misleading knowledge. To address these challenges, we propose the instance-level adaptive propulsion of external knowledge (IAPEK), where we only conduct the retrieval when necessary. To achieve this goal, we propose to model whether a PTLM contains enough knowledge to solve an instance with a novel metric, Thrust, which leverages the representation distribution of a small amount of seen instances. Extensive experiments demonstrate that Thrust is a good measurement of models' instance-level knowledgeability. Moreover, we can achieve higher cost-efficiency with the Thrust score as the retrieval indicator than the naive usage of external knowledge on 88% of the evaluated tasks, with 26% average performance improvement. Such findings shed light on the real-world practice of knowledge-enhanced LMs with a limited budget for knowledge seeking due to computation latency or costs.

Output: {"A": ["adaptive"], "B": ["RAG"], "C": ["Large Language Models"], "Template": ["A1 application of B1 to C1"]}

You task:

Title: {title}

Abstract: {abstract}

Output:"""

MERGE_PROMPT = """You are a helpful assistant who merges the keywords or phrases with their semantic similarity.

Here is a list of keywords or phrases for a {domain}:
{keywords}

Requirements:
1. Please merge the keywords by creating a keyword group in a valid decodable JSON format.
2. No need to merge the keywords that are not to similar.
3. Output the JSON format only.
4. Do not be lazy, please list the full output covering all keywords or phrases without omission.

The potential JSON format is:
{"keyword_group_name": ["keyword1", "keyword2", "keyword3"]}

The keyword group name should be a short and concise description of the keyword group. An example keyword group: "RAG": [RAG, retrieval augmented generation, retrieval augmentation]

Your output:"""

REWRITE_PROMPT = """You are a senior professor in AI, and your students propose to do a combination. Can you refine the title into a good one that can be accepted by top conferences such as ACL 2025 and ICLR 2026? Please output one title only, with no other text. Requirements: 1. Do not hallucinate, 2. do not use any existing paper names in your pretraining data. 3. make sure the title is with an outstanding paper quality so that your student can be happy and successfully graduate."""

DECOMPOSITION_PROMPT = """You are an expert in AI research taxonomy. I will give you lists of research themes (A), domains (B), and methodologies (C), and a paper title. Your task is to find the MOST SPECIFIC and ESSENTIAL concepts from these lists that capture the core of this paper.

THEMES (A): {themes}

DOMAINS (B): {domains}

METHODOLOGIES (C): {methodologies}

PAPER TITLE: "{title}"

Extract the most essential concepts that would allow someone to reconstruct a similar title:
- Select relevant themes from list A
- Select relevant domains from list B
- Select relevant methodologies from list C

Focus on concepts that are ESSENTIAL to the paper's contribution, not just tangentially related.

Respond with a JSON object:
{"selected_A": ["theme1", "theme2"], "selected_B": ["domain1"], "selected_C": ["methodology"], "confidence": 0.0-1.0, "explanation": "brief explanation"}"""

RECONSTRUCTION_PROMPT = """You are a senior AI researcher. Given these research concepts, generate 5 different realistic paper titles that combine them:

THEMES: {themes}
DOMAINS: {domains}
METHODOLOGIES: {methodologies}

Generate 5 diverse paper titles that would be suitable for a top-tier conference like ACL/EMNLP/NeurIPS. Each title should:
1. Combine all the given concepts naturally
2. Sound like a real research paper title
3. Be specific and technical
4. Be different from the others

Format as a numbered list:
1. [Title 1]
2. [Title 2]
3. [Title 3]
4. [Title 4]
5. [Title 5]"""


def fill(template: str, **values: str) -> str:
    """Replace {name} placeholders literally, leaving all other braces alone."""
    out = template
    for name, value in values.items():
        out = out.replace("{" + name + "}", value)
    return out
